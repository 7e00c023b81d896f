//! Sequential brute-force references. Every distributed result in this
//! crate is checked against one of these; each has an independent
//! cross-check (Prim vs Kruskal, two clique enumerators).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use thiserror::Error;

use crate::graph::{CommGraph, EdgeId, Labelling, NodeId, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("finite-weight edges do not span the graph")]
    InfeasibleSpanningTree,
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns whether the sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// The unique MST under the order (weight, u, v).
pub fn kruskal_mst(graph: &CommGraph, labelling: &Labelling) -> Result<BTreeSet<EdgeId>, OracleError> {
    let mut edges: Vec<(Weight, usize, usize)> =
        graph.edges().iter().map(|e| (labelling.weight(*e), e.u.index(), e.v.index())).collect();
    edges.sort();
    let mut dsu = Dsu::new(graph.n());
    let mut tree = BTreeSet::new();
    for (w, u, v) in edges {
        if dsu.union(u, v) {
            if !w.is_finite() {
                return Err(OracleError::InfeasibleSpanningTree);
            }
            tree.insert(EdgeId::of(u, v));
        }
    }
    Ok(tree)
}

/// Prim's algorithm from node 0 under the same order; cross-checks Kruskal.
pub fn prim_mst(graph: &CommGraph, labelling: &Labelling) -> Result<BTreeSet<EdgeId>, OracleError> {
    let n = graph.n();
    let mut in_tree = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut tree = BTreeSet::new();
    let push_from = |v: NodeId, heap: &mut BinaryHeap<std::cmp::Reverse<(Weight, EdgeId, NodeId)>>| {
        for &u in graph.neighbors(v) {
            let e = EdgeId::new(u, v);
            heap.push(std::cmp::Reverse((labelling.weight(e), e, u)));
        }
    };
    in_tree[0] = true;
    push_from(NodeId(0), &mut heap);
    while let Some(std::cmp::Reverse((w, e, u))) = heap.pop() {
        if in_tree[u.index()] {
            continue;
        }
        if !w.is_finite() {
            return Err(OracleError::InfeasibleSpanningTree);
        }
        in_tree[u.index()] = true;
        tree.insert(e);
        push_from(u, &mut heap);
    }
    Ok(tree)
}

/// Adjacency sets of the subgraph formed by `edges`.
pub fn adjacency(n: usize, edges: impl IntoIterator<Item = EdgeId>) -> Vec<BTreeSet<NodeId>> {
    let mut adj = vec![BTreeSet::new(); n];
    for e in edges {
        adj[e.u.index()].insert(e.v);
        adj[e.v.index()].insert(e.u);
    }
    adj
}

/// Per-node sets of k-cliques (sorted node lists) by scanning every
/// k-subset. Exponential; for small `n` only.
pub fn brute_cliques(n: usize, edges: &[EdgeId], k: usize) -> Vec<BTreeSet<Vec<NodeId>>> {
    let adj = adjacency(n, edges.iter().copied());
    let mut out = vec![BTreeSet::new(); n];
    let mut subset = Vec::with_capacity(k);
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        subset: &mut Vec<usize>,
        adj: &[BTreeSet<NodeId>],
        out: &mut [BTreeSet<Vec<NodeId>>],
    ) {
        if subset.len() == k {
            let complete = subset
                .iter()
                .enumerate()
                .all(|(i, &a)| subset[i + 1..].iter().all(|&b| adj[a].contains(&NodeId::from(b))));
            if complete {
                let c: Vec<NodeId> = subset.iter().map(|&x| NodeId::from(x)).collect();
                for &x in subset.iter() {
                    out[x].insert(c.clone());
                }
            }
            return;
        }
        for x in start..n {
            if n - x < k - subset.len() {
                break;
            }
            subset.push(x);
            rec(x + 1, n, k, subset, adj, out);
            subset.pop();
        }
    }
    rec(0, n, k, &mut subset, &adj, &mut out);
    out
}

/// Same result as [`brute_cliques`] by growing cliques through bitmask
/// intersection of higher-numbered neighbours. Requires `n ≤ 128`.
pub fn bitmask_cliques(n: usize, edges: &[EdgeId], k: usize) -> Vec<BTreeSet<Vec<NodeId>>> {
    assert!(n <= 128);
    let mut up = vec![0u128; n];
    for e in edges {
        up[e.u.index()] |= 1 << e.v.index();
    }
    let mut out = vec![BTreeSet::new(); n];
    fn grow(cur: &mut Vec<usize>, cand: u128, k: usize, up: &[u128], out: &mut [BTreeSet<Vec<NodeId>>]) {
        if cur.len() == k {
            let c: Vec<NodeId> = cur.iter().map(|&x| NodeId::from(x)).collect();
            for &x in cur.iter() {
                out[x].insert(c.clone());
            }
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            cur.push(x);
            grow(cur, cand & up[x], k, up, out);
            cur.pop();
        }
    }
    for v in 0..n {
        grow(&mut vec![v], up[v], k, &up, &mut out);
    }
    out
}

/// Dense product `S·T`.
pub fn matmul_reference(s: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = s.len();
    let m = t.first().map_or(0, Vec::len);
    let mut p = vec![vec![0i64; m]; n];
    for i in 0..n {
        for (k, &sik) in s[i].iter().enumerate() {
            if sik == 0 {
                continue;
            }
            for j in 0..m {
                p[i][j] += sik * t[k][j];
            }
        }
    }
    p
}

/// Number of triangles of a symmetric 0/1 adjacency matrix, by scanning
/// every triple.
pub fn triangle_reference(a: &[Vec<i64>]) -> u64 {
    let n = a.len();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if a[i][j] == 0 {
                continue;
            }
            for k in j + 1..n {
                if a[j][k] != 0 && a[i][k] != 0 {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Basis with the lexicographically smallest sorted key sequence, found by
/// enumerating every subset. `max` flips the order. At most 20 elements.
pub fn matroid_basis_exhaustive<T: Ord + Clone>(
    elements: &[T],
    independent: impl Fn(&[T]) -> bool,
    max: bool,
) -> Vec<T> {
    assert!(elements.len() <= 20);
    let mut sorted = elements.to_vec();
    sorted.sort();
    if max {
        sorted.reverse();
    }
    let mut best: Option<Vec<T>> = None;
    for mask in 0u32..(1 << sorted.len()) {
        let set: Vec<T> = (0..sorted.len()).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i].clone()).collect();
        if !independent(&set) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => match set.len().cmp(&b.len()) {
                Ordering::Greater => true,
                Ordering::Less => false,
                // both are in `sorted` order, so compare positions
                Ordering::Equal => {
                    let pos = |x: &T| sorted.iter().position(|y| y == x).unwrap();
                    set.iter().map(pos).lt(b.iter().map(pos))
                }
            },
        };
        if better {
            best = Some(set);
        }
    }
    let mut basis = best.unwrap_or_default();
    basis.sort();
    basis
}

/// Hop distances inside the subgraph formed by `edges` (`None` = unreachable).
pub fn apsp(n: usize, edges: &[EdgeId]) -> Vec<Vec<Option<usize>>> {
    let adj = adjacency(n, edges.iter().copied());
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                let d = dist[x].unwrap();
                for y in &adj[x] {
                    if dist[y.index()].is_none() {
                        dist[y.index()] = Some(d + 1);
                        q.push_back(y.index());
                    }
                }
            }
            dist
        })
        .collect()
}

/// Largest finite distance between two nodes of the same component.
pub fn subgraph_diameter(n: usize, edges: &[EdgeId]) -> usize {
    apsp(n, edges).into_iter().flatten().flatten().max().unwrap_or(0)
}

/// Degeneracy by repeatedly removing a minimum-degree node.
pub fn degeneracy(n: usize, edges: &[EdgeId]) -> usize {
    let mut adj = adjacency(n, edges.iter().copied());
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut d = 0;
    while let Some(&v) = alive.iter().min_by_key(|&&v| (adj[v].len(), v)) {
        d = d.max(adj[v].len());
        alive.remove(&v);
        let nbrs: Vec<NodeId> = adj[v].iter().copied().collect();
        for u in nbrs {
            adj[u.index()].remove(&NodeId::from(v));
        }
        adj[v].clear();
    }
    d
}

/// Whether the digraph given as (tail, head) arcs is acyclic.
pub fn is_acyclic(n: usize, arcs: &[(NodeId, NodeId)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(t, h) in arcs {
        indeg[h.index()] += 1;
        out.entry(t.index()).or_default().push(h.index());
    }
    let mut q: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = q.pop_front() {
        seen += 1;
        for &h in out.get(&v).into_iter().flatten() {
            indeg[h] -= 1;
            if indeg[h] == 0 {
                q.push_back(h);
            }
        }
    }
    seen == n
}

/// Sequential run of the iterative peeling orientation on the changed-edge
/// graph. Returns (tail, head) arcs.
pub fn orientation_reference(n: usize, edges: &[EdgeId], iterations: usize) -> Vec<(NodeId, NodeId)> {
    use crate::clique::orientation::{iteration_bound, iteration_length};
    let mut unoriented: BTreeSet<EdgeId> = edges.iter().copied().collect();
    let mut active: BTreeSet<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    let _ = n;
    let mut arcs = Vec::new();
    for d in 1..=iterations {
        for _ in 0..iteration_length(d) {
            let bound = iteration_bound(d);
            let halting: BTreeSet<NodeId> = active
                .iter()
                .copied()
                .filter(|&v| unoriented.iter().filter(|e| e.touches(v)).count() as f64 <= bound)
                .collect();
            let mut done = Vec::new();
            for e in &unoriented {
                let (hu, hv) = (halting.contains(&e.u), halting.contains(&e.v));
                match (hu, hv) {
                    (true, true) => arcs.push((e.u, e.v)),
                    (true, false) => arcs.push((e.u, e.v)),
                    (false, true) => arcs.push((e.v, e.u)),
                    (false, false) => continue,
                }
                done.push(*e);
            }
            for e in done {
                unoriented.remove(&e);
            }
            for v in halting {
                active.remove(&v);
            }
        }
    }
    assert!(unoriented.is_empty(), "orientation left edges unoriented");
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;

    fn weighted_cycle4() -> (CommGraph, Labelling) {
        let g = CommGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let labels = [((0, 1), 1), ((1, 2), 2), ((2, 3), 3), ((0, 3), 4)]
            .into_iter()
            .map(|((a, b), w)| (EdgeId::of(a, b), Label::w(w)))
            .collect();
        let l = Labelling::new(&g, labels).unwrap();
        (g, l)
    }

    #[test]
    fn kruskal_on_cycle_and_tree() {
        let (g, l) = weighted_cycle4();
        let expect: BTreeSet<EdgeId> = [EdgeId::of(0, 1), EdgeId::of(1, 2), EdgeId::of(2, 3)].into();
        assert_eq!(kruskal_mst(&g, &l).unwrap(), expect);
        assert_eq!(prim_mst(&g, &l).unwrap(), expect);

        let t = CommGraph::new(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let lt = Labelling::uniform(&t, Label::w(9));
        assert_eq!(kruskal_mst(&t, &lt).unwrap(), t.edges().iter().copied().collect());
    }

    #[test]
    fn equal_weights_break_ties_by_id() {
        let g = CommGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let l = Labelling::uniform(&g, Label::w(1));
        assert_eq!(kruskal_mst(&g, &l).unwrap(), [EdgeId::of(0, 1), EdgeId::of(0, 2)].into());
    }

    #[test]
    fn infinite_bridge_is_infeasible() {
        let g = CommGraph::new(2, [(0, 1)]).unwrap();
        let l = Labelling::uniform(&g, Label::Weight(Weight::Infinite));
        assert_eq!(kruskal_mst(&g, &l), Err(OracleError::InfeasibleSpanningTree));
        assert_eq!(prim_mst(&g, &l), Err(OracleError::InfeasibleSpanningTree));
    }

    #[test]
    fn clique_enumerators() {
        assert!(brute_cliques(5, &[], 3).iter().all(BTreeSet::is_empty));
        let k4: Vec<EdgeId> = (0..4).flat_map(|i| (i + 1..4).map(move |j| EdgeId::of(i, j))).collect();
        let per = brute_cliques(4, &k4, 4);
        assert!(per.iter().all(|s| s.len() == 1));
        assert_eq!(bitmask_cliques(4, &k4, 4), per);
        assert_eq!(brute_cliques(4, &k4, 3)[0].len(), 3);
    }

    #[test]
    fn matmul_identity_and_triangle() {
        let id = vec![vec![1, 0], vec![0, 1]];
        let t = vec![vec![2, 3], vec![4, 5]];
        assert_eq!(matmul_reference(&id, &t), t);
        let tri = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        assert_eq!(triangle_reference(&tri), 1);
    }

    #[test]
    fn exhaustive_basis_singleton() {
        assert_eq!(matroid_basis_exhaustive(&[7u32], |_| true, false), vec![7]);
        assert_eq!(matroid_basis_exhaustive(&[7u32], |s| s.is_empty(), true), Vec::<u32>::new());
        // uniform matroid of rank 2 on {1,2,3}
        assert_eq!(matroid_basis_exhaustive(&[3u32, 1, 2], |s| s.len() <= 2, false), vec![1, 2]);
        assert_eq!(matroid_basis_exhaustive(&[3u32, 1, 2], |s| s.len() <= 2, true), vec![2, 3]);
    }

    #[test]
    fn degeneracy_and_acyclicity() {
        let k4: Vec<EdgeId> = (0..4).flat_map(|i| (i + 1..4).map(move |j| EdgeId::of(i, j))).collect();
        assert_eq!(degeneracy(4, &k4), 3);
        let p: Vec<EdgeId> = (1..5).map(|i| EdgeId::of(i - 1, i)).collect();
        assert_eq!(degeneracy(5, &p), 1);
        assert!(is_acyclic(3, &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]));
        assert!(!is_acyclic(2, &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))]));
    }

    #[test]
    fn apsp_and_diameter() {
        let p: Vec<EdgeId> = (1..6).map(|i| EdgeId::of(i - 1, i)).collect();
        assert_eq!(subgraph_diameter(8, &p), 5);
        let d = apsp(8, &p);
        assert_eq!(d[0][5], Some(5));
        assert_eq!(d[0][7], None);
    }
}
