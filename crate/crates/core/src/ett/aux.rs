//! Per-node encoding of a spanning tree's tour labelling in a constant
//! number of words, and its decoding.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{EttError, EttRestriction, EulerTourForest, NodeInfo};
use crate::graph::{bits_for, id_bits, EdgeId, NodeId};

/// Tour root, parent, and the labels of the parent edge in both
/// directions. The root has itself as parent and no labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EttAux {
    pub root: NodeId,
    pub parent: NodeId,
    /// `L(parent, v)`.
    pub down: Option<u64>,
    /// `L(v, parent)`.
    pub up: Option<u64>,
}

impl EttAux {
    pub fn is_root(&self, me: NodeId) -> bool {
        self.parent == me
    }

    /// Two identifiers and two labels, the missing label encoded as `2n-2`.
    pub fn bit_size(n: usize) -> u64 {
        let label = bits_for(2 * n.max(1) as u64 - 2);
        2 * u64::from(id_bits(n)) + 2 * u64::from(label)
    }

    /// `a` of the node holding this aux in a tree with more than one node.
    pub fn min_outgoing(&self) -> u64 {
        self.down.map_or(0, |d| d + 1)
    }
}

/// Encodes a single spanning tree.
pub fn encode(forest: &EulerTourForest) -> Result<Vec<EttAux>, EttError> {
    let n = forest.n();
    let mut out: Vec<EttAux> = (0..n)
        .map(|v| {
            let v = NodeId::from(v);
            EttAux { root: forest.info(v).root, parent: v, down: None, up: None }
        })
        .collect();
    for e in forest.tree_edges() {
        let (luv, lvu) = (forest.label(e.u, e.v).expect("tree edge"), forest.label(e.v, e.u).expect("tree edge"));
        let (p, c, down, up) = if luv < lvu { (e.u, e.v, luv, lvu) } else { (e.v, e.u, lvu, luv) };
        out[c.index()] = EttAux { root: out[c.index()].root, parent: p, down: Some(down), up: Some(up) };
    }
    if n > 1 && forest.info(NodeId(0)).size != 2 * (n as u64 - 1) {
        return Err(EttError::Invalid("forest is not a spanning tree".into()));
    }
    Ok(out)
}

/// Rebuilds the global forest from every node's aux.
pub fn decode(aux: &[EttAux]) -> Result<EulerTourForest, EttError> {
    let n = aux.len();
    let s = 2 * (n as u64).saturating_sub(1);
    let mut labels = BTreeMap::new();
    let mut info = Vec::with_capacity(n);
    for (v, x) in aux.iter().enumerate() {
        let v = NodeId::from(v);
        if !x.is_root(v) {
            let (Some(d), Some(u)) = (x.down, x.up) else {
                return Err(EttError::Invalid(format!("node {v} has a parent but no labels")));
            };
            labels.insert((x.parent, v), d);
            labels.insert((v, x.parent), u);
        }
        info.push(NodeInfo { root: x.root, size: s, a: if x.is_root(v) { 0 } else { x.min_outgoing() } });
    }
    let f = EulerTourForest::from_parts(labels, info);
    f.validate()?;
    Ok(f)
}

/// What `me` knows after one exchange with its neighbours: the labels of all
/// its incident edges together with the node data of their endpoints.
pub fn restriction_from_aux(
    n: usize,
    me: NodeId,
    mine: &EttAux,
    neighbors: &[(NodeId, EttAux)],
) -> Result<EttRestriction, EttError> {
    let s = 2 * (n as u64 - 1);
    let info = |v: NodeId, x: &EttAux| NodeInfo {
        root: x.root,
        size: s,
        a: if x.is_root(v) { 0 } else { x.min_outgoing() },
    };
    let mut r = EttRestriction::new();
    r.insert_node(me, info(me, mine))?;
    for (u, x) in neighbors {
        r.insert_node(*u, info(*u, x))?;
        let e = EdgeId::new(me, *u);
        // (L(me, u), L(u, me))
        let (out, back) = if !mine.is_root(me) && mine.parent == *u {
            (mine.up, mine.down)
        } else if !x.is_root(*u) && x.parent == me {
            (x.down, x.up)
        } else {
            (None, None)
        };
        let labels = if me == e.u { (out, back) } else { (back, out) };
        r.insert_edge(e, labels)?;
    }
    Ok(r)
}

/// Reads `me`'s aux back out of a window covering its incident edges.
pub fn aux_from_restriction(me: NodeId, window: &EttRestriction) -> Result<EttAux, EttError> {
    let root = window.root_of(me)?;
    let mut aux = EttAux { root, parent: me, down: None, up: None };
    if root == me {
        return Ok(aux);
    }
    for (e, _) in window.edges().filter(|(e, _)| e.touches(me)) {
        let u = e.other(me);
        if let (Some(to_me), Some(from_me)) = (window.label(u, me)?, window.label(me, u)?) {
            if to_me < from_me {
                aux = EttAux { root, parent: u, down: Some(to_me), up: Some(from_me) };
            }
        }
    }
    if aux.parent == me {
        return Err(EttError::InconsistentWindow(format!("node {me} has no parent edge in its window")));
    }
    Ok(aux)
}
