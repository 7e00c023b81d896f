//! Batch dynamic k-clique enumeration.
//!
//! Each node stores the subgraph labels of every edge of its closed
//! neighbourhood's induced subgraph. A batch first orients the changed
//! edges with low outdegree ([`orientation`]); every node then tells all its
//! neighbours the new labels of its out-edges. Any changed edge inside a
//! node's closed neighbourhood has its tail in that neighbourhood, so the
//! view is complete after one exchange.

pub mod orientation;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{bits_for, CommGraph, EdgeId, Labelling, NodeId};
use crate::sim::{run_batch, BatchInput, NodeCtx, NodeProgram, Payload, RoundIo, RunResult, SimConfig, SimError, Status};
use orientation::Orienter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliqueError {
    #[error("clique size must be at least 3, got {0}")]
    KTooSmall(usize),
}

/// Subgraph membership of every edge among `N⁺(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodView {
    pub me: NodeId,
    pub y: BTreeMap<EdgeId, bool>,
}

impl NeighborhoodView {
    /// Builds the view of `v` from a global labelling.
    pub fn from_labelling(graph: &CommGraph, labelling: &Labelling, v: NodeId) -> Self {
        let mut closed: Vec<NodeId> = graph.neighbors(v).to_vec();
        closed.push(v);
        closed.sort_unstable();
        let mut y = BTreeMap::new();
        for (i, &a) in closed.iter().enumerate() {
            for &b in &closed[i + 1..] {
                if graph.has_edge(a, b) {
                    let e = EdgeId::new(a, b);
                    y.insert(e, labelling.is_set(e));
                }
            }
        }
        NeighborhoodView { me: v, y }
    }

    pub fn all(graph: &CommGraph, labelling: &Labelling) -> Vec<Self> {
        graph.nodes().map(|v| Self::from_labelling(graph, labelling, v)).collect()
    }

    pub fn present(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.y.get(&EdgeId::new(a, b)).copied().unwrap_or(false)
    }

    /// Sorted edge list with one membership bit per edge.
    pub fn bit_size(&self, n: usize) -> u64 {
        self.y.len() as u64 * (2 * u64::from(crate::graph::id_bits(n)) + 1)
    }
}

/// The k-cliques of the stored subgraph that contain the node, as sorted
/// node lists. Purely local.
pub fn enumerate_cliques(view: &NeighborhoodView, k: usize) -> Result<BTreeSet<Vec<NodeId>>, CliqueError> {
    if k < 3 {
        return Err(CliqueError::KTooSmall(k));
    }
    let v = view.me;
    let nbrs: Vec<NodeId> = {
        let mut s: BTreeSet<NodeId> = BTreeSet::new();
        for (e, &on) in &view.y {
            if on && e.touches(v) {
                s.insert(e.other(v));
            }
        }
        s.into_iter().collect()
    };
    let mut out = BTreeSet::new();
    let mut cur = Vec::with_capacity(k);
    fn extend(
        view: &NeighborhoodView,
        start: usize,
        nbrs: &[NodeId],
        cur: &mut Vec<NodeId>,
        need: usize,
        me: NodeId,
        out: &mut BTreeSet<Vec<NodeId>>,
    ) {
        if cur.len() == need {
            let mut c = cur.clone();
            c.push(me);
            c.sort_unstable();
            out.insert(c);
            return;
        }
        for i in start..nbrs.len() {
            let x = nbrs[i];
            if cur.iter().all(|&c| view.present(c, x)) {
                cur.push(x);
                extend(view, i + 1, nbrs, cur, need, me, out);
                cur.pop();
            }
        }
    }
    extend(view, 0, &nbrs, &mut cur, k - 1, v, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliqueMsg {
    /// The sender stopped orienting and the shared changed edge points here.
    Oriented,
    Item { edge: EdgeId, present: bool },
    ItemsEnd,
}

impl Payload for CliqueMsg {
    fn tag(&self) -> &'static str {
        match self {
            CliqueMsg::Oriented => "orient-flag",
            CliqueMsg::Item { .. } => "out-edge",
            CliqueMsg::ItemsEnd => "out-edge-end",
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            CliqueMsg::Oriented | CliqueMsg::ItemsEnd => 1,
            CliqueMsg::Item { .. } => 2 * id_bits + 1,
        }
    }
}

/// Per-node record of the orientation for checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationRecord {
    pub out_edges: Vec<EdgeId>,
    pub halt_round: usize,
    pub halt_iteration: usize,
}

#[derive(Debug, Clone)]
pub struct CliqueOutput {
    pub view: NeighborhoodView,
    pub orientation: OrientationRecord,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CliqueUpdate;

#[derive(Debug)]
pub struct CliqueState {
    me: NodeId,
    neighbors: Vec<NodeId>,
    new_labels: BTreeMap<NodeId, bool>,
    orienter: Orienter,
    outgoing: Vec<(EdgeId, bool)>,
    sent: usize,
    end_sent: bool,
    ended: BTreeSet<NodeId>,
    received: BTreeMap<EdgeId, bool>,
    view: NeighborhoodView,
    record: Option<OrientationRecord>,
}

impl NodeProgram for CliqueUpdate {
    type Input = BatchInput<NeighborhoodView>;
    type State = CliqueState;
    type Msg = CliqueMsg;
    type Output = CliqueOutput;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> CliqueState {
        let changed = input.labels.changed().map(|e| e.neighbor).collect::<Vec<_>>();
        CliqueState {
            me: ctx.id,
            neighbors: ctx.neighbors.to_vec(),
            new_labels: input.labels.edges.iter().map(|e| (e.neighbor, e.new.bit().unwrap_or(false))).collect(),
            orienter: Orienter::new(ctx.id, ctx.n, changed),
            outgoing: Vec::new(),
            sent: 0,
            end_sent: false,
            ended: BTreeSet::new(),
            received: BTreeMap::new(),
            view: input.aux,
            record: None,
        }
    }

    fn step(&self, st: &mut CliqueState, io: &mut RoundIo<'_, CliqueMsg>) -> Status {
        let t = io.round();
        let mut flags = Vec::new();
        for (from, m) in io.inbox() {
            match m {
                CliqueMsg::Oriented => flags.push(*from),
                CliqueMsg::Item { edge, present } => {
                    st.received.insert(*edge, *present);
                }
                CliqueMsg::ItemsEnd => {
                    st.ended.insert(*from);
                }
            }
        }
        if !st.orienter.is_resolved() {
            let notify = st.orienter.round(t, &flags);
            for u in notify {
                io.send(u, CliqueMsg::Oriented);
            }
            if !st.orienter.is_resolved() {
                return Status::Continue;
            }
            // out-edge set is final from here on
            let (halt_round, halt_iteration) = st.orienter.halted().expect("resolved implies halted");
            io.mark_phase("orientation");
            st.outgoing = st
                .orienter
                .out_neighbors()
                .map(|u| (EdgeId::new(st.me, u), st.new_labels[&u]))
                .collect();
            st.record = Some(OrientationRecord {
                out_edges: st.outgoing.iter().map(|(e, _)| *e).collect(),
                halt_round,
                halt_iteration,
            });
        }
        if !st.end_sent {
            if let Some(&(edge, present)) = st.outgoing.get(st.sent) {
                io.send_all(CliqueMsg::Item { edge, present });
                st.sent += 1;
            } else {
                io.send_all(CliqueMsg::ItemsEnd);
                st.end_sent = true;
            }
        }
        if st.end_sent && st.ended.len() == st.neighbors.len() {
            let own = st.outgoing.iter().map(|(e, p)| (e, p));
            for (e, p) in own.chain(st.received.iter()) {
                if let Some(slot) = st.view.y.get_mut(e) {
                    *slot = *p;
                }
            }
            io.mark_phase("exchange");
            return Status::Halt;
        }
        Status::Continue
    }

    fn finish(&self, st: CliqueState) -> CliqueOutput {
        CliqueOutput { view: st.view, orientation: st.record.expect("orientation finished") }
    }

    fn output_bits(&self, out: &CliqueOutput, n: usize) -> u64 {
        out.view.bit_size(n)
    }
}

/// Runs one batch and returns the per-node results.
pub fn run_clique_batch(
    graph: &CommGraph,
    l1: &Labelling,
    l2: &Labelling,
    views: Vec<NeighborhoodView>,
    config: &SimConfig,
) -> Result<RunResult<CliqueOutput>, SimError> {
    run_batch(&CliqueUpdate, graph, l1, l2, views, config)
}

/// Maximum number of bits any single node stores, and the total.
pub fn view_space(views: &[NeighborhoodView], n: usize) -> (u64, u64) {
    let per: Vec<u64> = views.iter().map(|v| v.bit_size(n)).collect();
    (per.iter().copied().max().unwrap_or(0), per.iter().sum())
}

/// Bits of one view entry, exposed for reporting.
pub fn entry_bits(n: usize) -> u32 {
    2 * crate::graph::id_bits(n) + bits_for(1)
}

#[cfg(test)]
mod tests;
