//! Euler tour labellings of spanning forests.
//!
//! Every directed tree edge carries its position on an Euler tour of its
//! tree; each node knows its tree's tour root `r`, the tour length `s` and
//! `a`, the label of one edge leaving it. Rerooting, joining and cutting are
//! pure label arithmetic, and the new labels of an edge `f` depend only on
//! the old labels of `f`, of the operated edge `e`, and on the node data of
//! their endpoints. [`EttRestriction`] holds such a window and is what the
//! distributed algorithms manipulate; [`forest::EulerTourForest`] is the
//! global reference.

pub mod aux;
pub mod forest;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub use aux::{restriction_from_aux, EttAux};
pub use forest::EulerTourForest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EttError {
    #[error("endpoints of {0} are already in the same tree")]
    SameTree(EdgeId),
    #[error("{0} is not a tree edge")]
    NotTreeEdge(EdgeId),
    #[error("window lacks data for {0}")]
    InconsistentWindow(String),
    #[error("invalid forest: {0}")]
    Invalid(String),
}

/// Per-node tour data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeInfo {
    /// Tail of label 0 in this node's tree.
    pub root: NodeId,
    /// Number of directed edges of the tree.
    pub size: u64,
    /// Label of one outgoing edge, 0 for a singleton. Starts out as the
    /// smallest outgoing label; rerooting shifts it along with the labels,
    /// so afterwards it names some outgoing edge but not always the
    /// smallest.
    pub a: u64,
}

impl NodeInfo {
    pub fn singleton(v: NodeId) -> Self {
        NodeInfo { root: v, size: 0, a: 0 }
    }
}

/// Labels of both directions of an edge, `(L(u,v), L(v,u))` with `u < v`.
/// `None` stands for ∞.
pub type EdgeLabels = (Option<u64>, Option<u64>);

/// The tour labelling restricted to a set of edges and their endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EttRestriction {
    edges: BTreeMap<EdgeId, EdgeLabels>,
    nodes: BTreeMap<NodeId, NodeInfo>,
}

fn shift_down(x: u64, by: u64, modulus: u64) -> u64 {
    (x + modulus - by % modulus) % modulus
}

impl EttRestriction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_node(&mut self, v: NodeId, info: NodeInfo) -> Result<(), EttError> {
        match self.nodes.insert(v, info) {
            Some(old) if old != info => Err(EttError::InconsistentWindow(format!("conflicting data for node {v}"))),
            _ => Ok(()),
        }
    }

    /// Inserts an edge; both endpoints must already be present.
    pub fn insert_edge(&mut self, e: EdgeId, labels: EdgeLabels) -> Result<(), EttError> {
        if !self.nodes.contains_key(&e.u) || !self.nodes.contains_key(&e.v) {
            return Err(EttError::InconsistentWindow(format!("edge {e} without endpoint data")));
        }
        match self.edges.insert(e, labels) {
            Some(old) if old != labels => Err(EttError::InconsistentWindow(format!("conflicting labels for {e}"))),
            _ => Ok(()),
        }
    }

    /// Union of two windows of the same labelling.
    pub fn merge(&mut self, other: &EttRestriction) -> Result<(), EttError> {
        for (&v, &info) in &other.nodes {
            self.insert_node(v, info)?;
        }
        for (&e, &l) in &other.edges {
            self.insert_edge(e, l)?;
        }
        Ok(())
    }

    /// Sub-window over `edges` (which must be in the domain).
    pub fn restrict(&self, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self, EttError> {
        let mut out = EttRestriction::new();
        for e in edges {
            let l = *self.edges.get(&e).ok_or_else(|| EttError::InconsistentWindow(format!("edge {e} not in window")))?;
            out.nodes.insert(e.u, self.nodes[&e.u]);
            out.nodes.insert(e.v, self.nodes[&e.v]);
            out.edges.insert(e, l);
        }
        Ok(out)
    }

    pub fn node(&self, v: NodeId) -> Option<&NodeInfo> {
        self.nodes.get(&v)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeInfo)> {
        self.nodes.iter().map(|(v, i)| (*v, i))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, EdgeLabels)> + '_ {
        self.edges.iter().map(|(e, l)| (*e, *l))
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// `L(from, to)`; `None` is ∞. Errors if the edge is outside the window.
    pub fn label(&self, from: NodeId, to: NodeId) -> Result<Option<u64>, EttError> {
        let e = EdgeId::new(from, to);
        let (lu, lv) = self.edges.get(&e).ok_or_else(|| EttError::InconsistentWindow(format!("edge {e} not in window")))?;
        Ok(if from == e.u { *lu } else { *lv })
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(&e), Some((Some(_), Some(_))))
    }

    fn info(&self, v: NodeId) -> Result<NodeInfo, EttError> {
        self.nodes.get(&v).copied().ok_or_else(|| EttError::InconsistentWindow(format!("node {v} not in window")))
    }

    pub fn root_of(&self, v: NodeId) -> Result<NodeId, EttError> {
        Ok(self.info(v)?.root)
    }

    /// Makes `u` the tour root of its tree.
    pub fn root(&mut self, u: NodeId) -> Result<(), EttError> {
        let iu = self.info(u)?;
        if iu.size == 0 {
            return Ok(());
        }
        let (r, s, shift) = (iu.root, iu.size, iu.a);
        let in_tree: Vec<NodeId> = self.nodes.iter().filter(|(_, i)| i.root == r).map(|(v, _)| *v).collect();
        for (e, (lu, lv)) in self.edges.iter_mut() {
            if self.nodes[&e.u].root == r {
                *lu = lu.map(|x| shift_down(x, shift, s));
                *lv = lv.map(|x| shift_down(x, shift, s));
            }
        }
        for v in in_tree {
            let i = self.nodes.get_mut(&v).expect("listed above");
            i.a = shift_down(i.a, shift, s);
            i.root = u;
        }
        Ok(())
    }

    /// Links the trees of the endpoints of `e` with `e`; the smaller endpoint
    /// becomes the root of the merged tree.
    pub fn join(&mut self, e: EdgeId) -> Result<(), EttError> {
        let (vi, vj) = (e.u, e.v);
        if self.info(vi)?.root == self.info(vj)?.root {
            return Err(EttError::SameTree(e));
        }
        if !self.edges.contains_key(&e) {
            return Err(EttError::InconsistentWindow(format!("edge {e} not in window")));
        }
        self.root(vi)?;
        self.root(vj)?;
        let si = self.nodes[&vi].size;
        let sj = self.nodes[&vj].size;
        let merged = si + sj + 2;
        for (f, (lu, lv)) in self.edges.iter_mut() {
            if self.nodes[&f.u].root == vj {
                *lu = lu.map(|x| x + si + 1);
                *lv = lv.map(|x| x + si + 1);
            }
        }
        for i in self.nodes.values_mut() {
            if i.root == vj {
                i.a += si + 1;
                i.root = vi;
                i.size = merged;
            } else if i.root == vi {
                i.size = merged;
            }
        }
        self.edges.insert(e, (Some(si), Some(si + sj + 1)));
        Ok(())
    }

    /// Removes the tree edge `e`; the two halves are rooted at its endpoints.
    pub fn cut(&mut self, e: EdgeId) -> Result<(), EttError> {
        let Some(&(Some(luv), Some(lvu))) = self.edges.get(&e) else {
            return match self.edges.get(&e) {
                None => Err(EttError::InconsistentWindow(format!("edge {e} not in window"))),
                Some(_) => Err(EttError::NotTreeEdge(e)),
            };
        };
        let r = self.info(e.u)?.root;
        self.info(e.v)?;
        // the parent side enters the edge first
        let (v1, v2, z1, z2) = if luv < lvu { (e.u, e.v, luv, lvu) } else { (e.v, e.u, lvu, luv) };
        let x = z2 - z1;
        for (f, (lu, lv)) in self.edges.iter_mut() {
            if *f == e || self.nodes[&f.u].root != r {
                continue;
            }
            let relabel = |l: Option<u64>| {
                l.map(|l| {
                    if l < z1 {
                        l
                    } else if l > z1 && l < z2 {
                        l - z1 - 1
                    } else {
                        l - x - 1
                    }
                })
            };
            *lu = relabel(*lu);
            *lv = relabel(*lv);
        }
        for i in self.nodes.values_mut() {
            if i.root != r {
                continue;
            }
            if i.a <= z1 {
                i.size -= x + 1;
                i.root = v1;
            } else if i.a <= z2 {
                i.size = x - 1;
                i.a -= z1 + 1;
                i.root = v2;
            } else {
                i.size -= x + 1;
                i.a -= x + 1;
                i.root = v1;
            }
        }
        self.edges.insert(e, (None, None));
        self.root(v1)?;
        self.root(v2)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests;
