//! Global Euler tour forest: the reference the windows are checked against.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{EdgeLabels, EttError, EttRestriction, NodeInfo};
use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerTourForest {
    /// Directed tree edges and their labels; absent means ∞.
    labels: BTreeMap<(NodeId, NodeId), u64>,
    info: Vec<NodeInfo>,
}

impl EulerTourForest {
    /// `n` isolated nodes.
    pub fn singletons(n: usize) -> Self {
        EulerTourForest { labels: BTreeMap::new(), info: (0..n).map(|v| NodeInfo::singleton(NodeId::from(v))).collect() }
    }

    /// Tours of a forest: each tree is rooted at its smallest node and walked
    /// depth-first with children in ascending order.
    pub fn from_tree(n: usize, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self, EttError> {
        let mut adj = vec![BTreeSet::new(); n];
        for e in edges {
            if e.v.index() >= n {
                return Err(EttError::Invalid(format!("edge {e} out of range")));
            }
            adj[e.u.index()].insert(e.v);
            adj[e.v.index()].insert(e.u);
        }
        let mut f = Self::singletons(n);
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let root = NodeId::from(start);
            // iterative DFS recording the directed edge sequence
            let mut tour = Vec::new();
            let mut members = vec![root];
            seen[start] = true;
            let mut stack: Vec<(NodeId, Option<NodeId>, Vec<NodeId>)> =
                vec![(root, None, adj[start].iter().rev().copied().collect())];
            while let Some((v, parent, pending)) = stack.last_mut() {
                let (v, parent) = (*v, *parent);
                match pending.pop() {
                    Some(c) if Some(c) == parent => {}
                    Some(c) => {
                        if seen[c.index()] {
                            return Err(EttError::Invalid(format!("cycle through {}", EdgeId::new(v, c))));
                        }
                        seen[c.index()] = true;
                        members.push(c);
                        tour.push((v, c));
                        stack.push((c, Some(v), adj[c.index()].iter().rev().copied().collect()));
                    }
                    None => {
                        if let Some(p) = parent {
                            tour.push((v, p));
                        }
                        stack.pop();
                    }
                }
            }
            let size = tour.len() as u64;
            for (i, arc) in tour.iter().enumerate() {
                f.labels.insert(*arc, i as u64);
            }
            for v in members {
                f.info[v.index()] = NodeInfo { root, size, a: 0 };
            }
            for (i, (tail, _)) in tour.iter().enumerate().rev() {
                f.info[tail.index()].a = i as u64;
            }
        }
        Ok(f)
    }

    pub(crate) fn from_parts(labels: BTreeMap<(NodeId, NodeId), u64>, info: Vec<NodeInfo>) -> Self {
        EulerTourForest { labels, info }
    }

    pub fn n(&self) -> usize {
        self.info.len()
    }

    pub fn info(&self, v: NodeId) -> NodeInfo {
        self.info[v.index()]
    }

    pub fn label(&self, from: NodeId, to: NodeId) -> Option<u64> {
        self.labels.get(&(from, to)).copied()
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.labels.contains_key(&(e.u, e.v))
    }

    pub fn tree_edges(&self) -> BTreeSet<EdgeId> {
        self.labels.keys().filter(|(a, b)| a < b).map(|&(a, b)| EdgeId::new(a, b)).collect()
    }

    fn adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.n()];
        for &(a, b) in self.labels.keys() {
            adj[a.index()].push(b);
        }
        adj
    }

    /// Nodes of the tree containing `v`, found by walking tree edges.
    pub fn component(&self, v: NodeId) -> Vec<NodeId> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x.index()] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    fn component_arcs(&self, comp: &[NodeId]) -> Vec<(NodeId, NodeId)> {
        let set: BTreeSet<NodeId> = comp.iter().copied().collect();
        self.labels.keys().filter(|(a, _)| set.contains(a)).copied().collect()
    }

    pub fn root(&mut self, u: NodeId) {
        let s = self.info(u).size;
        if s == 0 {
            return;
        }
        let shift = self.info(u).a;
        let comp = self.component(u);
        for arc in self.component_arcs(&comp) {
            let l = self.labels.get_mut(&arc).expect("arc listed");
            *l = (*l + s - shift) % s;
        }
        for v in comp {
            let i = &mut self.info[v.index()];
            i.a = (i.a + s - shift) % s;
            i.root = u;
        }
    }

    pub fn join(&mut self, e: EdgeId) -> Result<(), EttError> {
        let (vi, vj) = (e.u, e.v);
        let ci = self.component(vi);
        if ci.contains(&vj) {
            return Err(EttError::SameTree(e));
        }
        self.root(vi);
        self.root(vj);
        let cj = self.component(vj);
        let (si, sj) = (self.info(vi).size, self.info(vj).size);
        for arc in self.component_arcs(&cj) {
            *self.labels.get_mut(&arc).expect("arc listed") += si + 1;
        }
        for &v in &cj {
            let i = &mut self.info[v.index()];
            i.a += si + 1;
        }
        self.labels.insert((vi, vj), si);
        self.labels.insert((vj, vi), si + sj + 1);
        for v in ci.iter().chain(&cj) {
            let i = &mut self.info[v.index()];
            i.root = vi;
            i.size = si + sj + 2;
        }
        Ok(())
    }

    pub fn cut(&mut self, e: EdgeId) -> Result<(), EttError> {
        if !self.is_tree_edge(e) {
            return Err(EttError::NotTreeEdge(e));
        }
        let (v1, v2) = if self.label(e.u, e.v) < self.label(e.v, e.u) { (e.u, e.v) } else { (e.v, e.u) };
        let z1 = self.labels.remove(&(v1, v2)).expect("tree edge");
        let z2 = self.labels.remove(&(v2, v1)).expect("tree edge");
        let x = z2 - z1;
        // the two halves by connectivity, not by label ranges
        let t2 = self.component(v2);
        let t1 = self.component(v1);
        let s = self.info(v1).size;
        for arc in self.component_arcs(&t1).into_iter().chain(self.component_arcs(&t2)) {
            let l = self.labels.get_mut(&arc).expect("arc listed");
            *l = if *l < z1 {
                *l
            } else if *l < z2 {
                *l - z1 - 1
            } else {
                *l - x - 1
            };
        }
        for &v in &t1 {
            let i = &mut self.info[v.index()];
            i.size = s - x - 1;
            if i.a > z2 {
                i.a -= x + 1;
            }
            i.root = v1;
        }
        for &v in &t2 {
            let i = &mut self.info[v.index()];
            i.size = x - 1;
            i.a -= z1 + 1;
            i.root = v2;
        }
        self.root(v1);
        self.root(v2);
        Ok(())
    }

    /// Window over `edges` and their endpoints.
    pub fn restrict(&self, edges: impl IntoIterator<Item = EdgeId>) -> EttRestriction {
        let mut r = EttRestriction::new();
        for e in edges {
            r.insert_node(e.u, self.info(e.u)).expect("consistent");
            r.insert_node(e.v, self.info(e.v)).expect("consistent");
            let l: EdgeLabels = (self.label(e.u, e.v), self.label(e.v, e.u));
            r.insert_edge(e, l).expect("consistent");
        }
        r
    }

    /// Checks every structural invariant: each tree's labels trace an Euler
    /// tour starting at its root, and the node data agrees with the labels.
    pub fn validate(&self) -> Result<(), EttError> {
        let bad = |m: String| Err(EttError::Invalid(m));
        for &(a, b) in self.labels.keys() {
            if !self.labels.contains_key(&(b, a)) {
                return bad(format!("arc ({a},{b}) without its reverse"));
            }
        }
        let mut done = vec![false; self.n()];
        for v0 in 0..self.n() {
            if done[v0] {
                continue;
            }
            let comp = self.component(NodeId::from(v0));
            for v in &comp {
                done[v.index()] = true;
            }
            let arcs = self.component_arcs(&comp);
            if arcs.len() != 2 * (comp.len() - 1) {
                return bad(format!("component of {v0} is not a tree"));
            }
            let s = arcs.len() as u64;
            let r = self.info[comp[0].index()].root;
            let mut by_label = vec![None; arcs.len()];
            for arc in &arcs {
                let l = self.labels[arc];
                if l >= s || by_label[l as usize].is_some() {
                    return bad(format!("label {l} repeated or out of range in tree of {v0}"));
                }
                by_label[l as usize] = Some(*arc);
            }
            for (k, arc) in by_label.iter().enumerate() {
                let (_, head) = arc.expect("bijection");
                let (next_tail, _) = by_label[(k + 1) % by_label.len()].expect("bijection");
                if head != next_tail {
                    return bad(format!("labels {k} and {} do not chain", k + 1));
                }
            }
            if let Some(Some((tail, _))) = by_label.first() {
                if *tail != r {
                    return bad(format!("root {r} does not own label 0"));
                }
            } else if comp != [r] {
                return bad(format!("singleton {v0} has root {r}"));
            }
            for v in &comp {
                let i = self.info[v.index()];
                if i.root != r || i.size != s {
                    return bad(format!("node {v} disagrees on root or size"));
                }
                let owns = if s == 0 { i.a == 0 } else { i.a < s && by_label[i.a as usize].is_some_and(|(t, _)| t == *v) };
                if !owns {
                    return bad(format!("node {v} has a = {} which is not one of its outgoing labels", i.a));
                }
            }
        }
        Ok(())
    }

    /// Same tours with every `a` reset to the smallest outgoing label.
    pub fn normalized(&self) -> Self {
        let mut f = self.clone();
        for i in f.info.iter_mut() {
            i.a = if i.size == 0 { 0 } else { u64::MAX };
        }
        for (&(t, _), &l) in &self.labels {
            let a = &mut f.info[t.index()].a;
            *a = (*a).min(l);
        }
        f
    }

    /// Node partition into trees, as sorted member lists.
    pub fn partition(&self) -> BTreeSet<Vec<NodeId>> {
        let mut done = vec![false; self.n()];
        let mut out = BTreeSet::new();
        for v in 0..self.n() {
            if !done[v] {
                let c = self.component(NodeId::from(v));
                for x in &c {
                    done[x.index()] = true;
                }
                out.insert(c);
            }
        }
        out
    }
}
