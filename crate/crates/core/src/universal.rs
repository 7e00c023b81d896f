//! Problem-independent batch updates.
//!
//! [`UniversalUpdate`] keeps the whole labelling at every node: a batch
//! builds a BFS tree, broadcasts the changed edges with their new labels and
//! reruns a solver locally. [`Local1Update`] handles problems whose output
//! at a node depends only on the labels within radius `r`: changes are
//! flooded for `r` phases, each node forwarding only what it has not sent
//! before, so the round count does not depend on the diameter.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{CommGraph, EdgeId, Label, Labelling, NodeId};
use crate::primitives::{BfsBuilder, CastMsg, CastSlot, Item, KeepAll, PrimMsg, TreePosition};
use crate::sim::{BatchInput, NodeCtx, NodeProgram, Payload, RoundIo, Status};

/// A changed edge and its new label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Change {
    pub edge: EdgeId,
    pub label: Label,
}

impl Item for Change {
    fn bits(&self, id_bits: u32) -> u32 {
        2 * id_bits + self.label.bits()
    }
}

/// Bits of a full labelling copy: every edge with its label.
pub fn labelling_bits(labelling: &Labelling, n: usize) -> u64 {
    let id = u64::from(crate::graph::id_bits(n));
    labelling.iter().map(|(_, l)| 2 * id + u64::from(l.bits())).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalOutput<O> {
    pub labelling: Labelling,
    pub output: O,
}

/// Broadcast-everything update. The stored labelling's key set is the
/// communication graph, so the solver may use the topology freely.
#[derive(Debug, Clone, Copy)]
pub struct UniversalUpdate<'g, F> {
    pub graph: &'g CommGraph,
    pub solver: F,
}

pub fn universal_update<F, O>(graph: &CommGraph, solver: F) -> UniversalUpdate<'_, F>
where
    F: Fn(&CommGraph, &Labelling, NodeId) -> O + Sync,
{
    UniversalUpdate { graph, solver }
}

#[derive(Debug)]
pub struct UniversalState {
    me: NodeId,
    bfs: BfsBuilder,
    local: Vec<Change>,
    pos: Option<TreePosition>,
    slot: CastSlot<Change, KeepAll>,
    stored: Labelling,
}

impl<F, O> NodeProgram for UniversalUpdate<'_, F>
where
    F: Fn(&CommGraph, &Labelling, NodeId) -> O + Sync,
    O: Send,
{
    type Input = BatchInput<Labelling>;
    type State = UniversalState;
    type Msg = PrimMsg<Change>;
    type Output = UniversalOutput<O>;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> UniversalState {
        // each change is reported by its smaller endpoint
        let local = input
            .labels
            .changed()
            .filter(|e| ctx.id < e.neighbor)
            .map(|e| Change { edge: input.labels.edge(e), label: e.new })
            .collect();
        UniversalState {
            me: ctx.id,
            bfs: BfsBuilder::new(ctx.id, ctx.n, ctx.neighbors),
            local,
            pos: None,
            slot: CastSlot::default(),
            stored: input.aux,
        }
    }

    fn step(&self, st: &mut UniversalState, io: &mut RoundIo<'_, Self::Msg>) -> Status {
        let mut bfs_in = Vec::new();
        for (from, m) in io.inbox() {
            match m {
                PrimMsg::Bfs(b) => bfs_in.push((*from, b.clone())),
                PrimMsg::Cast(c) => st.slot.deliver(*from, c.clone()),
            }
        }
        if st.pos.is_none() {
            let mut out = Vec::new();
            if let Some(pos) = st.bfs.round(&bfs_in, &mut out) {
                io.mark_phase("bfs");
                st.slot.start(pos.clone(), std::mem::take(&mut st.local), KeepAll);
                st.pos = Some(pos);
            }
            for (to, m) in out {
                io.send(to, PrimMsg::Bfs(m));
            }
            return Status::Continue;
        }
        let mut out: Vec<(NodeId, CastMsg<Change>)> = Vec::new();
        let res = st.slot.round(&mut out).expect("keep-all filter cannot fail");
        for (to, m) in out {
            io.send(to, PrimMsg::Cast(m));
        }
        match res {
            Some(changes) => {
                for c in changes {
                    st.stored.set(c.edge, c.label);
                }
                io.mark_phase("broadcast");
                Status::Halt
            }
            None => Status::Continue,
        }
    }

    fn finish(&self, st: UniversalState) -> UniversalOutput<O> {
        let output = (self.solver)(self.graph, &st.stored, st.me);
        UniversalOutput { labelling: st.stored, output }
    }

    fn output_bits(&self, out: &UniversalOutput<O>, n: usize) -> u64 {
        labelling_bits(&out.labelling, n)
    }
}

/// Labels of every edge with an endpoint at distance at most `r` from `me`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusRView {
    pub me: NodeId,
    pub r: usize,
    pub labels: BTreeMap<EdgeId, Label>,
}

impl RadiusRView {
    pub fn from_labelling(graph: &CommGraph, labelling: &Labelling, v: NodeId, r: usize) -> Self {
        let dist = graph.bfs_distances(v);
        let near = |x: NodeId| dist[x.index()].is_some_and(|d| d <= r);
        let labels =
            graph.edges().iter().filter(|e| near(e.u) || near(e.v)).map(|e| (*e, labelling.label(*e))).collect();
        RadiusRView { me: v, r, labels }
    }

    pub fn all(graph: &CommGraph, labelling: &Labelling, r: usize) -> Vec<Self> {
        graph.nodes().map(|v| Self::from_labelling(graph, labelling, v, r)).collect()
    }

    pub fn bit_size(&self, n: usize) -> u64 {
        let id = u64::from(crate::graph::id_bits(n));
        self.labels.values().map(|l| 2 * id + u64::from(l.bits())).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FloodMsg {
    Item { phase: u8, change: Change },
    PhaseEnd { phase: u8 },
}

impl Payload for FloodMsg {
    fn tag(&self) -> &'static str {
        match self {
            FloodMsg::Item { .. } => "flood-item",
            FloodMsg::PhaseEnd { .. } => "flood-end",
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            FloodMsg::Item { change, .. } => 8 + change.bits(id_bits),
            FloodMsg::PhaseEnd { .. } => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOutput<O> {
    pub view: RadiusRView,
    pub output: O,
}

/// Radius-`r` flooding update.
#[derive(Debug, Clone, Copy)]
pub struct Local1Update<F> {
    pub r: usize,
    pub solver: F,
}

pub fn local1_update<F, O>(r: usize, solver: F) -> Local1Update<F>
where
    F: Fn(&RadiusRView) -> O + Sync,
{
    assert!((1..=u8::MAX as usize).contains(&r), "radius must be in 1..=255");
    Local1Update { r, solver }
}

#[derive(Debug)]
pub struct FloodState {
    degree: usize,
    view: RadiusRView,
    phase: usize,
    /// What this node forwards in the current phase, in key order.
    sending: Vec<Change>,
    sent: usize,
    end_sent: bool,
    forwarded: BTreeSet<Change>,
    /// Items and end markers by phase; a neighbour may run one phase ahead.
    received: BTreeMap<usize, BTreeSet<Change>>,
    ended: BTreeMap<usize, usize>,
    learned: BTreeSet<Change>,
}

impl<F, O> NodeProgram for Local1Update<F>
where
    F: Fn(&RadiusRView) -> O + Sync,
    O: Send,
{
    type Input = BatchInput<RadiusRView>;
    type State = FloodState;
    type Msg = FloodMsg;
    type Output = LocalOutput<O>;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> FloodState {
        let own: Vec<Change> =
            input.labels.changed().map(|e| Change { edge: input.labels.edge(e), label: e.new }).collect();
        FloodState {
            degree: ctx.neighbors.len(),
            view: input.aux,
            phase: 1,
            learned: own.iter().copied().collect(),
            sending: own,
            sent: 0,
            end_sent: false,
            forwarded: BTreeSet::new(),
            received: BTreeMap::new(),
            ended: BTreeMap::new(),
        }
    }

    fn step(&self, st: &mut FloodState, io: &mut RoundIo<'_, FloodMsg>) -> Status {
        for (_, m) in io.inbox() {
            match m {
                FloodMsg::Item { phase, change } => {
                    st.received.entry(usize::from(*phase)).or_default().insert(*change);
                }
                FloodMsg::PhaseEnd { phase } => *st.ended.entry(usize::from(*phase)).or_default() += 1,
            }
        }
        loop {
            if !st.end_sent {
                let phase = st.phase as u8;
                match st.sending.get(st.sent) {
                    Some(&change) => {
                        io.send_all(FloodMsg::Item { phase, change });
                        st.sent += 1;
                    }
                    None => {
                        io.send_all(FloodMsg::PhaseEnd { phase });
                        st.end_sent = true;
                    }
                }
                return Status::Continue;
            }
            if st.ended.get(&st.phase).copied().unwrap_or(0) < st.degree {
                return Status::Continue;
            }
            // phase complete: next set is what arrived minus what was forwarded
            let got = st.received.remove(&st.phase).unwrap_or_default();
            st.forwarded.extend(st.sending.drain(..));
            st.learned.extend(got.iter().copied());
            if st.phase == self.r {
                for c in &st.learned {
                    if let Some(l) = st.view.labels.get_mut(&c.edge) {
                        *l = c.label;
                    }
                }
                io.mark_phase("flood");
                return Status::Halt;
            }
            st.sending = got.into_iter().filter(|c| !st.forwarded.contains(c)).collect();
            st.sent = 0;
            st.end_sent = false;
            st.phase += 1;
        }
    }

    fn finish(&self, st: FloodState) -> LocalOutput<O> {
        let output = (self.solver)(&st.view);
        LocalOutput { view: st.view, output }
    }

    fn output_bits(&self, out: &LocalOutput<O>, n: usize) -> u64 {
        out.view.bit_size(n)
    }
}

#[cfg(test)]
mod tests;
