//! BFS tree construction and pipelined set broadcast / filtered
//! convergecast, the building blocks of every global algorithm.

pub mod bfs;
pub mod treecast;

pub use bfs::{BfsBuilder, BfsMsg, BfsTree, TreePosition};
pub use treecast::{CastError, CastMsg, Item, KeepAll, Retain, TreeCast};

use std::marker::PhantomData;

use crate::graph::NodeId;
use crate::sim::{NodeCtx, NodeProgram, Payload, RoundIo, Status};

/// A tree cast that may receive messages before it is started.
#[derive(Debug, Clone)]
pub struct CastSlot<T, F> {
    cast: Option<TreeCast<T, F>>,
    inbox: Vec<(NodeId, CastMsg<T>)>,
    result: Option<Vec<T>>,
}

impl<T: Item, F: Retain<T>> Default for CastSlot<T, F> {
    fn default() -> Self {
        CastSlot { cast: None, inbox: Vec::new(), result: None }
    }
}

impl<T: Item, F: Retain<T>> CastSlot<T, F> {
    pub fn deliver(&mut self, from: NodeId, msg: CastMsg<T>) {
        self.inbox.push((from, msg));
    }

    pub fn start(&mut self, pos: TreePosition, local: Vec<T>, filter: F) {
        self.cast = Some(TreeCast::new(pos, local, filter));
    }

    pub fn is_started(&self) -> bool {
        self.cast.is_some()
    }

    pub fn result(&self) -> Option<&[T]> {
        self.result.as_deref()
    }

    pub fn filter(&self) -> Option<&F> {
        self.cast.as_ref().map(|c| c.filter())
    }

    /// Runs one round if started; returns the result in the finishing round.
    pub fn round(&mut self, out: &mut Vec<(NodeId, CastMsg<T>)>) -> Result<Option<Vec<T>>, CastError> {
        let Some(cast) = self.cast.as_mut() else { return Ok(None) };
        let inbox = std::mem::take(&mut self.inbox);
        let res = cast.round(&inbox, out)?;
        if let Some(items) = &res {
            self.result = Some(items.clone());
        }
        Ok(res)
    }
}

/// Message of a BFS-then-cast program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimMsg<T> {
    Bfs(BfsMsg),
    Cast(CastMsg<T>),
}

impl<T: Item> Payload for PrimMsg<T> {
    fn tag(&self) -> &'static str {
        match self {
            PrimMsg::Bfs(m) => m.tag(),
            PrimMsg::Cast(m) => m.tag(),
        }
    }

    fn words(&self) -> u32 {
        match self {
            PrimMsg::Bfs(m) => m.words(),
            PrimMsg::Cast(m) => m.words(),
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            PrimMsg::Bfs(m) => m.bits(id_bits),
            PrimMsg::Cast(m) => m.bits(id_bits),
        }
    }
}

/// Builds the BFS tree and halts.
#[derive(Debug, Clone, Copy, Default)]
pub struct BfsProgram;

#[derive(Debug)]
pub struct BfsState {
    builder: BfsBuilder,
    pos: Option<TreePosition>,
}

impl NodeProgram for BfsProgram {
    type Input = ();
    type State = BfsState;
    type Msg = BfsMsg;
    type Output = TreePosition;

    fn init(&self, ctx: &NodeCtx<'_>, _input: ()) -> BfsState {
        BfsState { builder: BfsBuilder::new(ctx.id, ctx.n, ctx.neighbors), pos: None }
    }

    fn step(&self, st: &mut BfsState, io: &mut RoundIo<'_, BfsMsg>) -> Status {
        let mut out = Vec::new();
        let res = st.builder.round(io.inbox(), &mut out);
        for (to, m) in out {
            io.send(to, m);
        }
        match res {
            Some(pos) => {
                st.pos = Some(pos);
                io.mark_phase("bfs");
                Status::Halt
            }
            None => Status::Continue,
        }
    }

    fn finish(&self, st: BfsState) -> TreePosition {
        st.pos.expect("halted after finishing")
    }
}

/// Builds the BFS tree, then makes every node learn the union of all local
/// item sets.
#[derive(Debug, Clone, Copy)]
pub struct BroadcastProgram<T>(PhantomData<fn() -> T>);

impl<T> Default for BroadcastProgram<T> {
    fn default() -> Self {
        BroadcastProgram(PhantomData)
    }
}

#[derive(Debug)]
pub struct BroadcastState<T> {
    bfs: BfsBuilder,
    local: Option<Vec<T>>,
    pos: Option<TreePosition>,
    slot: CastSlot<T, KeepAll>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastOutput<T> {
    pub position: TreePosition,
    pub items: Vec<T>,
}

impl<T: Item> NodeProgram for BroadcastProgram<T> {
    type Input = Vec<T>;
    type State = BroadcastState<T>;
    type Msg = PrimMsg<T>;
    type Output = BroadcastOutput<T>;

    fn init(&self, ctx: &NodeCtx<'_>, local: Vec<T>) -> Self::State {
        BroadcastState {
            bfs: BfsBuilder::new(ctx.id, ctx.n, ctx.neighbors),
            local: Some(local),
            pos: None,
            slot: CastSlot::default(),
        }
    }

    fn step(&self, st: &mut Self::State, io: &mut RoundIo<'_, Self::Msg>) -> Status {
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
                st.slot.start(pos.clone(), st.local.take().unwrap_or_default(), KeepAll);
                st.pos = Some(pos);
            }
            for (to, m) in out {
                io.send(to, PrimMsg::Bfs(m));
            }
            return Status::Continue;
        }
        let mut out = Vec::new();
        let res = st.slot.round(&mut out).expect("keep-all filter cannot fail");
        for (to, m) in out {
            io.send(to, PrimMsg::Cast(m));
        }
        if res.is_some() {
            io.mark_phase("broadcast");
            Status::Halt
        } else {
            Status::Continue
        }
    }

    fn finish(&self, st: Self::State) -> BroadcastOutput<T> {
        BroadcastOutput {
            position: st.pos.expect("finished BFS"),
            items: st.slot.result().map(<[T]>::to_vec).unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests;
