//! Communication graphs, edge labellings and batch updates.
//!
//! The communication topology is fixed for the lifetime of an experiment;
//! only the labelling changes. A [`BatchUpdate`] rewrites up to `α` labels at
//! once and [`apply_batch`] produces the next labelling together with the set
//! of changed edges.

pub mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default exponent of the weight cap `n^C`.
pub const DEFAULT_WEIGHT_EXPONENT: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is disconnected: node {0} is unreachable from node 0")]
    Disconnected(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(EdgeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("node id {0} out of range for n = {1}")]
    BadNodeId(u64, usize),
    #[error("graph needs at least two nodes, got {0}")]
    TooSmall(usize),
    #[error("edge {0} is not part of the communication graph")]
    UnknownEdge(EdgeId),
    #[error("batch sets {0} to its current label")]
    NoOpChange(EdgeId),
    #[error("edge {0} changed twice in one batch")]
    DuplicateChange(EdgeId),
    #[error("labelling mixes bit and weight labels")]
    MixedLabelKinds,
    #[error("labelling does not cover edge {0}")]
    MissingLabel(EdgeId),
    #[error("weight labels required")]
    NotWeighted,
}

/// Node identifier. Identifiers are dense (`0..n`) inside the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v as u32)
    }
}

/// Undirected edge in canonical form `u < v`. The derived order is the
/// lexicographic order on `(u, v)`, which doubles as the edge-identifier
/// tie-break of the total weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub u: NodeId,
    pub v: NodeId,
}

impl EdgeId {
    /// Canonicalises the endpoint order. Panics on a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        assert_ne!(a, b, "self-loop {a}");
        if a < b {
            EdgeId { u: a, v: b }
        } else {
            EdgeId { u: b, v: a }
        }
    }

    pub fn of(a: usize, b: usize) -> Self {
        EdgeId::new(NodeId::from(a), NodeId::from(b))
    }

    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }

    pub fn touches(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Static, connected, simple, undirected communication graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    adjacency: Vec<Vec<NodeId>>,
    edges: Vec<EdgeId>,
    diameter: usize,
}

impl CommGraph {
    /// Validates the edge list and computes the diameter.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::BadNodeId(x as u64, n));
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(NodeId::from(a)));
            }
            let e = EdgeId::of(a, b);
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
            adjacency[a].push(NodeId::from(b));
            adjacency[b].push(NodeId::from(a));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut graph = CommGraph { adjacency, edges: seen.into_iter().collect(), diameter: 0 };
        let dist = graph.bfs_distances(NodeId(0));
        if let Some(idx) = dist.iter().position(Option::is_none) {
            return Err(GraphError::Disconnected(NodeId::from(idx)));
        }
        graph.diameter = (0..n)
            .map(|s| graph.eccentricity(NodeId::from(s)))
            .max()
            .unwrap_or(0);
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).map(NodeId::from)
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    /// Edges in canonical sorted order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.has_edge(e.u, e.v)
    }

    pub fn incident_edges(&self, v: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.adjacency[v.index()].iter().map(move |&u| EdgeId::new(u, v))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.m() == n * (n - 1) / 2
    }

    /// BFS distances from `src` (`None` = unreachable).
    pub fn bfs_distances(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src.index()] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.index()].unwrap();
            for &y in self.neighbors(x) {
                if dist[y.index()].is_none() {
                    dist[y.index()] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, v: NodeId) -> usize {
        self.bfs_distances(v).into_iter().flatten().max().unwrap_or(0)
    }

    /// Bits needed to write one node identifier, `⌈log₂ n⌉` (at least 1).
    pub fn id_bits(&self) -> u32 {
        id_bits(self.n())
    }
}

/// `⌈log₂ n⌉`, clamped to at least one bit.
pub fn id_bits(n: usize) -> u32 {
    let mut b = 0u32;
    while (1usize << b) < n {
        b += 1;
    }
    b.max(1)
}

/// Bits needed to write any value in `0..=max`.
pub fn bits_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

/// Edge weight: a bounded integer or infinity. Every finite weight orders
/// below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Weight {
    Finite(i64),
    Infinite,
}

impl Weight {
    pub fn is_finite(self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    /// Encoded length: sign + magnitude for finite values, one flag bit on top.
    pub fn bits(self) -> u32 {
        match self {
            Weight::Finite(w) => 2 + bits_for(w.unsigned_abs()),
            Weight::Infinite => 1,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

/// Edge label: subgraph membership bit or a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Bit(bool),
    Weight(Weight),
}

impl Label {
    pub fn w(w: i64) -> Self {
        Label::Weight(Weight::Finite(w))
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Label::Bit(b) => Some(b),
            Label::Weight(_) => None,
        }
    }

    pub fn weight(self) -> Option<Weight> {
        match self {
            Label::Weight(w) => Some(w),
            Label::Bit(_) => None,
        }
    }

    pub fn same_kind(self, other: Label) -> bool {
        matches!((self, other), (Label::Bit(_), Label::Bit(_)) | (Label::Weight(_), Label::Weight(_)))
    }

    pub fn bits(self) -> u32 {
        match self {
            Label::Bit(_) => 1,
            Label::Weight(w) => w.bits(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Bit(b) => write!(f, "{}", u8::from(*b)),
            Label::Weight(w) => write!(f, "{w}"),
        }
    }
}

/// Total labelling `E → Σ` of a communication graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labelling {
    labels: BTreeMap<EdgeId, Label>,
}

impl Labelling {
    /// Checks that the labelling covers exactly the graph's edges with one
    /// label kind.
    pub fn new(graph: &CommGraph, labels: BTreeMap<EdgeId, Label>) -> Result<Self, GraphError> {
        for e in graph.edges() {
            if !labels.contains_key(e) {
                return Err(GraphError::MissingLabel(*e));
            }
        }
        if let Some(e) = labels.keys().find(|e| !graph.contains(**e)) {
            return Err(GraphError::UnknownEdge(*e));
        }
        let mut kinds = labels.values();
        if let Some(first) = kinds.next() {
            if kinds.any(|l| !l.same_kind(*first)) {
                return Err(GraphError::MixedLabelKinds);
            }
        }
        Ok(Labelling { labels })
    }

    /// Every edge carries `label`.
    pub fn uniform(graph: &CommGraph, label: Label) -> Self {
        Labelling { labels: graph.edges().iter().map(|e| (*e, label)).collect() }
    }

    pub fn get(&self, e: EdgeId) -> Option<Label> {
        self.labels.get(&e).copied()
    }

    pub fn label(&self, e: EdgeId) -> Label {
        self.labels[&e]
    }

    pub fn weight(&self, e: EdgeId) -> Weight {
        self.labels[&e].weight().expect("weight labelling")
    }

    pub fn is_set(&self, e: EdgeId) -> bool {
        self.labels.get(&e).and_then(|l| l.bit()).unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Label)> + '_ {
        self.labels.iter().map(|(e, l)| (*e, *l))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_weighted(&self) -> bool {
        self.labels.values().next().is_some_and(|l| l.weight().is_some())
    }

    /// Edges labelled `1` in a subgraph labelling.
    pub fn subgraph_edges(&self) -> Vec<EdgeId> {
        self.labels.iter().filter(|(_, l)| l.bit() == Some(true)).map(|(e, _)| *e).collect()
    }

    pub(crate) fn set(&mut self, e: EdgeId, l: Label) {
        self.labels.insert(e, l);
    }
}

/// Atomic set of label changes; its size is the batch parameter `α`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchUpdate {
    changes: BTreeMap<EdgeId, Label>,
}

impl BatchUpdate {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a batch, rejecting an edge listed twice.
    pub fn from_changes(changes: impl IntoIterator<Item = (EdgeId, Label)>) -> Result<Self, GraphError> {
        let mut batch = BatchUpdate::new();
        for (e, l) in changes {
            batch.push(e, l)?;
        }
        Ok(batch)
    }

    pub fn push(&mut self, e: EdgeId, l: Label) -> Result<(), GraphError> {
        if self.changes.insert(e, l).is_some() {
            return Err(GraphError::DuplicateChange(e));
        }
        Ok(())
    }

    pub fn alpha(&self) -> usize {
        self.changes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Label)> + '_ {
        self.changes.iter().map(|(e, l)| (*e, *l))
    }
}

/// Applies `batch` to `old`, returning the new labelling and the changed
/// edge set `Ė`. Setting a label to its current value is an error so that
/// `α = |Ė|` always holds.
pub fn apply_batch(old: &Labelling, batch: &BatchUpdate) -> Result<(Labelling, BTreeSet<EdgeId>), GraphError> {
    let mut next = old.clone();
    let mut changed = BTreeSet::new();
    for (e, l) in batch.iter() {
        let current = old.get(e).ok_or(GraphError::UnknownEdge(e))?;
        if current == l {
            return Err(GraphError::NoOpChange(e));
        }
        if !current.same_kind(l) {
            return Err(GraphError::MixedLabelKinds);
        }
        next.set(e, l);
        changed.insert(e);
    }
    Ok((next, changed))
}

/// Splits the changed edges of a weight batch into increments `E⁺` and
/// decrements `E⁻`.
pub fn split_weight_batch(
    old: &Labelling,
    new: &Labelling,
    changed: &BTreeSet<EdgeId>,
) -> Result<(BTreeSet<EdgeId>, BTreeSet<EdgeId>), GraphError> {
    let mut plus = BTreeSet::new();
    let mut minus = BTreeSet::new();
    for &e in changed {
        let (Some(Label::Weight(w1)), Some(Label::Weight(w2))) = (old.get(e), new.get(e)) else {
            return Err(GraphError::NotWeighted);
        };
        if w2 > w1 {
            plus.insert(e);
        } else if w2 < w1 {
            minus.insert(e);
        }
    }
    Ok((plus, minus))
}
