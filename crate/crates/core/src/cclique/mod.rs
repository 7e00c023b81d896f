//! Batch dynamic algorithms in the congested clique: every pair of nodes
//! shares a link, so a batch of `α` changes can be replicated everywhere in
//! `O(⌈α/n⌉)` rounds.

pub mod matmul;
pub mod route;

use thiserror::Error;

use crate::graph::{CommGraph, Labelling, NodeId};
use crate::primitives::Item;
use crate::sim::{run, run_batch, BatchInput, NodeCtx, NodeProgram, RoundIo, RunResult, SimConfig, SimError, Status};
use crate::universal::{labelling_bits, Change, UniversalOutput};
pub use matmul::{
    run_matmul_batch, run_triangle_batch, triangle_batch, triangle_count_update, DynMatmul, MatInput, MatOutput,
    MatrixRowAux,
};
pub use route::{AllCast, CcMsg, Router};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcError {
    #[error("communication graph is not a clique")]
    NotAClique,
    #[error("row {0} of the stored product disagrees with S·T")]
    InconsistentAux(usize),
    #[error("batch changes ({0},{1}) without its mirror entry")]
    AsymmetricBatch(usize, usize),
    #[error("matrix input: {0}")]
    Matrix(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn require_clique(graph: &CommGraph) -> Result<(), CcError> {
    if graph.is_complete() {
        Ok(())
    } else {
        Err(CcError::NotAClique)
    }
}

/// Point-to-point routing as a standalone program.
#[derive(Debug)]
pub struct CcRoute<T>(std::marker::PhantomData<fn() -> T>);

impl<T> Default for CcRoute<T> {
    fn default() -> Self {
        CcRoute(std::marker::PhantomData)
    }
}

impl<T: Item> NodeProgram for CcRoute<T> {
    type Input = Vec<(NodeId, T)>;
    type State = (Router<T>, Option<Vec<(NodeId, T)>>);
    type Msg = CcMsg<T>;
    type Output = Vec<(NodeId, T)>;

    fn init(&self, ctx: &NodeCtx<'_>, demands: Self::Input) -> Self::State {
        (Router::new(ctx.id, ctx.n, demands), None)
    }

    fn step(&self, st: &mut Self::State, io: &mut RoundIo<'_, CcMsg<T>>) -> Status {
        for (_, m) in io.inbox() {
            st.0.receive(m);
        }
        let mut out = Vec::new();
        let res = st.0.round(&mut out);
        for (to, m) in out {
            io.send(to, m);
        }
        match res {
            Some(d) => {
                st.1 = Some(d);
                io.mark_phase("route");
                Status::Halt
            }
            None => Status::Continue,
        }
    }

    fn finish(&self, st: Self::State) -> Self::Output {
        st.1.expect("halted with deliveries")
    }
}

/// Delivers every `(destination, item)` demand; each node gets its
/// `(source, item)` pairs in sorted order.
pub fn cc_route<T: Item>(
    graph: &CommGraph,
    demands: Vec<Vec<(NodeId, T)>>,
    config: &SimConfig,
) -> Result<RunResult<Vec<(NodeId, T)>>, CcError> {
    require_clique(graph)?;
    Ok(run(&CcRoute::<T>::default(), graph, demands, config)?)
}

/// Replicates every node's items to all nodes.
#[derive(Debug)]
pub struct AllCastProgram<T>(std::marker::PhantomData<fn() -> T>);

impl<T> Default for AllCastProgram<T> {
    fn default() -> Self {
        AllCastProgram(std::marker::PhantomData)
    }
}

impl<T: Item> NodeProgram for AllCastProgram<T> {
    type Input = Vec<T>;
    type State = (AllCast<T>, Option<Vec<T>>);
    type Msg = CcMsg<T>;
    type Output = Vec<T>;

    fn init(&self, ctx: &NodeCtx<'_>, items: Vec<T>) -> Self::State {
        (AllCast::new(ctx.id, ctx.n, items), None)
    }

    fn step(&self, st: &mut Self::State, io: &mut RoundIo<'_, CcMsg<T>>) -> Status {
        for (from, m) in io.inbox() {
            st.0.receive(*from, m);
        }
        let mut out = Vec::new();
        let res = st.0.round(&mut out);
        for (to, m) in out {
            io.send(to, m);
        }
        match res {
            Some(all) => {
                st.1 = Some(all);
                io.mark_phase("allcast");
                Status::Halt
            }
            None => Status::Continue,
        }
    }

    fn finish(&self, st: Self::State) -> Vec<T> {
        st.1.expect("halted with items")
    }
}

pub fn cc_allcast<T: Item>(
    graph: &CommGraph,
    items: Vec<Vec<T>>,
    config: &SimConfig,
) -> Result<RunResult<Vec<T>>, CcError> {
    require_clique(graph)?;
    Ok(run(&AllCastProgram::<T>::default(), graph, items, config)?)
}

/// Universal update on the clique: the changed labels are all-cast instead
/// of broadcast over a BFS tree.
#[derive(Debug, Clone, Copy)]
pub struct CcUniversal<'g, F> {
    pub graph: &'g CommGraph,
    pub solver: F,
}

pub fn cc_universal_update<F, O>(graph: &CommGraph, solver: F) -> CcUniversal<'_, F>
where
    F: Fn(&CommGraph, &Labelling, NodeId) -> O + Sync,
{
    CcUniversal { graph, solver }
}

#[derive(Debug)]
pub struct CcUniversalState {
    me: NodeId,
    cast: AllCast<Change>,
    stored: Labelling,
}

impl<F, O> NodeProgram for CcUniversal<'_, F>
where
    F: Fn(&CommGraph, &Labelling, NodeId) -> O + Sync,
    O: Send,
{
    type Input = BatchInput<Labelling>;
    type State = CcUniversalState;
    type Msg = CcMsg<Change>;
    type Output = UniversalOutput<O>;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> CcUniversalState {
        let own = input
            .labels
            .changed()
            .filter(|e| ctx.id < e.neighbor)
            .map(|e| Change { edge: input.labels.edge(e), label: e.new })
            .collect();
        CcUniversalState { me: ctx.id, cast: AllCast::new(ctx.id, ctx.n, own), stored: input.aux }
    }

    fn step(&self, st: &mut CcUniversalState, io: &mut RoundIo<'_, Self::Msg>) -> Status {
        for (from, m) in io.inbox() {
            st.cast.receive(*from, m);
        }
        let mut out = Vec::new();
        let res = st.cast.round(&mut out);
        for (to, m) in out {
            io.send(to, m);
        }
        match res {
            Some(changes) => {
                for c in changes {
                    st.stored.set(c.edge, c.label);
                }
                io.mark_phase("allcast");
                Status::Halt
            }
            None => Status::Continue,
        }
    }

    fn finish(&self, st: CcUniversalState) -> UniversalOutput<O> {
        let output = (self.solver)(self.graph, &st.stored, st.me);
        UniversalOutput { labelling: st.stored, output }
    }

    fn output_bits(&self, out: &UniversalOutput<O>, n: usize) -> u64 {
        labelling_bits(&out.labelling, n)
    }
}

pub fn run_cc_universal<F, O>(
    graph: &CommGraph,
    l1: &Labelling,
    l2: &Labelling,
    solver: F,
    config: &SimConfig,
) -> Result<RunResult<UniversalOutput<O>>, CcError>
where
    F: Fn(&CommGraph, &Labelling, NodeId) -> O + Sync,
    O: Send,
{
    require_clique(graph)?;
    let prog = cc_universal_update(graph, solver);
    Ok(run_batch(&prog, graph, l1, l2, vec![l1.clone(); graph.n()], config)?)
}

#[cfg(test)]
mod tests;
