//! Minimum spanning tree maintenance under batches of weight changes.
//!
//! A node's auxiliary state is its [`EttAux`]: the tour labels of its parent
//! edge in the current tree. A batch runs in stages:
//!
//! 1. one round of aux exchange, giving every node the tour window over
//!    its incident edges;
//! 2. a BFS tree and a broadcast of the decorations of all changed edges;
//! 3. the minimum basis `A*` of the contraction matroid (increments), then
//!    a local replay of cuts and joins;
//! 4. the maximum basis `B*` of the dual matroid over the tree plus the
//!    decreased edges (decrements), and its replay;
//! 5. every node re-encodes its aux from its window.
//!
//! Every node replays the same operations in the same order on windows that
//! contain every operated edge, so the windows stay restrictions of one
//! global labelling.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::ett::aux::{aux_from_restriction, decode, encode};
use crate::ett::{restriction_from_aux, EttAux, EttError, EttRestriction, EulerTourForest};
use crate::graph::{CommGraph, EdgeId, Labelling, NodeId, Weight};
use crate::matroid::{owner, Contraction, Decoration, Dual, Element, GreedyFilter, Matroid};
use crate::oracles::{kruskal_mst, OracleError};
use crate::primitives::{BfsBuilder, BfsMsg, CastError, CastMsg, CastSlot, KeepAll, TreePosition};
use crate::sim::{run_batch, BatchInput, IncidentLabels, Metrics, NodeCtx, NodeProgram, Payload, RoundIo, SimConfig, SimError, Status, TranscriptLine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MstError {
    #[error("{phase} basis has {got} elements, expected rank {expected}")]
    BasisRankMismatch { phase: &'static str, expected: usize, got: usize },
    #[error("finite-weight edges do not span the graph")]
    InfeasibleSpanningTree,
    #[error(transparent)]
    Ett(#[from] EttError),
    #[error(transparent)]
    Cast(#[from] CastError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl From<OracleError> for MstError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::InfeasibleSpanningTree => MstError::InfeasibleSpanningTree,
        }
    }
}

/// Strict total order on edges: weight, then identifier. `Infinite` sorts
/// after every finite weight.
pub fn total_order_key(e: EdgeId, w: Weight) -> (Weight, EdgeId) {
    (w, e)
}

/// Initial aux state: Kruskal's tree with tours rooted at the smallest node.
pub fn bootstrap(graph: &CommGraph, labelling: &Labelling) -> Result<Vec<EttAux>, MstError> {
    let tree = kruskal_mst(graph, labelling)?;
    let forest = EulerTourForest::from_tree(graph.n(), tree)?;
    Ok(encode(&forest)?)
}

/// The tree encoded by all nodes' aux.
pub fn decode_tree(aux: &[EttAux]) -> Result<BTreeSet<EdgeId>, EttError> {
    Ok(decode(aux)?.tree_edges())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MstMsg {
    Aux(EttAux),
    Bfs(BfsMsg),
    Changes(CastMsg<Element>),
    Increments(CastMsg<Element>),
    Decrements(CastMsg<Reverse<Element>>),
}

impl Payload for MstMsg {
    fn tag(&self) -> &'static str {
        match self {
            MstMsg::Aux(_) => "ett-aux",
            MstMsg::Bfs(m) => m.tag(),
            MstMsg::Changes(m) | MstMsg::Increments(m) => m.tag(),
            MstMsg::Decrements(m) => m.tag(),
        }
    }

    fn words(&self) -> u32 {
        match self {
            MstMsg::Aux(_) => 1,
            MstMsg::Bfs(m) => m.words(),
            MstMsg::Changes(m) | MstMsg::Increments(m) => m.words(),
            MstMsg::Decrements(m) => m.words(),
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            // labels are below 2n
            MstMsg::Aux(_) => 2 * id_bits + 2 * (id_bits + 1),
            MstMsg::Bfs(m) => m.bits(id_bits),
            MstMsg::Changes(m) | MstMsg::Increments(m) => m.bits(id_bits),
            MstMsg::Decrements(m) => m.bits(id_bits),
        }
    }
}

/// The batch update program. Input aux must encode the minimum spanning
/// tree of the old labelling.
#[derive(Debug, Clone, Copy, Default)]
pub struct MstUpdate;

pub fn mst_update() -> MstUpdate {
    MstUpdate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Exchange,
    Bfs,
    Changes,
    Increments,
    Decrements,
    Done,
}

#[derive(Debug)]
pub struct MstState {
    me: NodeId,
    n: usize,
    labels: IncidentLabels,
    aux: EttAux,
    stage: Stage,
    window: EttRestriction,
    bfs: BfsBuilder,
    pos: Option<TreePosition>,
    changes: CastSlot<Element, KeepAll>,
    inc: CastSlot<Element, GreedyFilter<Contraction>>,
    dec: CastSlot<Reverse<Element>, GreedyFilter<Dual>>,
    contraction: Option<Contraction>,
    dual: Option<Dual>,
    /// Post-increment decorations of the decreased edges.
    decreased: Vec<Decoration>,
    error: Option<MstError>,
}

fn weights(labels: &IncidentLabels, u: NodeId) -> (Weight, Weight) {
    let e = labels.get(u).expect("incident edge");
    (e.old.weight().expect("weight labelling"), e.new.weight().expect("weight labelling"))
}

impl MstState {
    /// Incident changed edges this node owns, decorated from its window.
    fn owned_changes(&self) -> Result<Vec<Element>, EttError> {
        let mut out = Vec::new();
        for e in self.labels.changed() {
            let edge = self.labels.edge(e);
            if owner(edge) == self.me {
                let (w1, w2) = weights(&self.labels, e.neighbor);
                out.push(Element::new(w2, Decoration::from_window(&self.window, edge, w1, w2)?));
            }
        }
        Ok(out)
    }

    /// After the change broadcast: sets up the increment basis or skips it.
    fn begin_increments(&mut self, changes: &[Element]) -> Result<(), MstError> {
        for c in changes {
            c.deco.add_to(&mut self.window)?;
        }
        let plus: Vec<Decoration> = changes.iter().map(|c| c.deco).filter(|d| d.w2 > d.w1).collect();
        let contraction = Contraction::new(&plus)?;
        if contraction.rank() == 0 {
            return self.begin_decrements(changes);
        }
        // candidates: every owned edge outside T \ E⁺, at intermediate weight
        let mut local = Vec::new();
        for x in &self.labels.edges {
            let edge = self.labels.edge(x);
            if owner(edge) != self.me {
                continue;
            }
            let (w1, w2) = (x.old.weight().expect("weight"), x.new.weight().expect("weight"));
            let increased = w2 > w1;
            if self.window.is_tree_edge(edge) && !increased {
                continue;
            }
            let deco = Decoration::from_window(&self.window, edge, w1, w2)?;
            local.push(Element::new(if increased { w2 } else { w1 }, deco));
        }
        let pos = self.pos.clone().expect("BFS done");
        self.inc.start(pos, local, GreedyFilter::new(contraction.clone()));
        self.contraction = Some(contraction);
        self.stage = Stage::Increments;
        Ok(())
    }

    fn replay_increments(&mut self, basis: &[Element], changes: &[Element]) -> Result<(), MstError> {
        let contraction = self.contraction.take().expect("set up before the cast");
        if basis.len() != contraction.rank() {
            return Err(MstError::BasisRankMismatch { phase: "increment", expected: contraction.rank(), got: basis.len() });
        }
        for b in basis {
            b.deco.add_to(&mut self.window)?;
        }
        let kept: BTreeSet<EdgeId> = basis.iter().map(Element::edge).collect();
        for &e in contraction.cut_edges() {
            if !kept.contains(&e) {
                self.window.cut(e)?;
            }
        }
        for b in basis.iter().filter(|b| !b.deco.is_tree_edge()) {
            self.window.join(b.edge())?;
        }
        self.begin_decrements(changes)
    }

    fn begin_decrements(&mut self, changes: &[Element]) -> Result<(), MstError> {
        self.decreased = changes
            .iter()
            .filter(|c| c.deco.w2 < c.deco.w1)
            .map(|c| Decoration::from_window(&self.window, c.edge(), c.deco.w1, c.deco.w2))
            .collect::<Result<_, _>>()?;
        let dual = Dual::new(&self.decreased)?;
        if dual.rank() == 0 {
            self.stage = Stage::Done;
            return Ok(());
        }
        let mut local = Vec::new();
        for x in &self.labels.edges {
            let edge = self.labels.edge(x);
            if owner(edge) != self.me {
                continue;
            }
            let (w1, w2) = (x.old.weight().expect("weight"), x.new.weight().expect("weight"));
            if self.window.is_tree_edge(edge) || w2 < w1 {
                let deco = Decoration::from_window(&self.window, edge, w1, w2)?;
                local.push(Reverse(Element::new(w2, deco)));
            }
        }
        let pos = self.pos.clone().expect("BFS done");
        self.dec.start(pos, local, GreedyFilter::new(dual.clone()));
        self.dual = Some(dual);
        self.stage = Stage::Decrements;
        Ok(())
    }

    fn replay_decrements(&mut self, basis: &[Reverse<Element>]) -> Result<(), MstError> {
        let dual = self.dual.take().expect("set up before the cast");
        if basis.len() != dual.rank() {
            return Err(MstError::BasisRankMismatch { phase: "decrement", expected: dual.rank(), got: basis.len() });
        }
        let mut basis: Vec<Element> = basis.iter().map(|r| r.0).collect();
        basis.sort();
        for b in &basis {
            b.deco.add_to(&mut self.window)?;
        }
        for b in basis.iter().filter(|b| b.deco.is_tree_edge()) {
            self.window.cut(b.edge())?;
        }
        let removed: BTreeSet<EdgeId> = basis.iter().map(Element::edge).collect();
        for &e in dual.spare_edges() {
            if !removed.contains(&e) {
                self.window.join(e)?;
            }
        }
        self.stage = Stage::Done;
        Ok(())
    }

    fn step(&mut self, io: &mut RoundIo<'_, MstMsg>) -> Result<(), MstError> {
        let mut neighbor_aux = Vec::new();
        let mut bfs_in = Vec::new();
        for (from, m) in io.inbox() {
            match m {
                MstMsg::Aux(x) => neighbor_aux.push((*from, *x)),
                MstMsg::Bfs(b) => bfs_in.push((*from, b.clone())),
                MstMsg::Changes(c) => self.changes.deliver(*from, c.clone()),
                MstMsg::Increments(c) => self.inc.deliver(*from, c.clone()),
                MstMsg::Decrements(c) => self.dec.deliver(*from, c.clone()),
            }
        }
        match self.stage {
            Stage::Exchange => {
                io.send_all(MstMsg::Aux(self.aux));
                self.stage = Stage::Bfs;
            }
            Stage::Bfs => {
                if io.round() == 2 {
                    self.window = restriction_from_aux(self.n, self.me, &self.aux, &neighbor_aux)?;
                    io.mark_phase("exchange");
                }
                let mut out = Vec::new();
                if let Some(pos) = self.bfs.round(&bfs_in, &mut out) {
                    io.mark_phase("bfs");
                    let local = self.owned_changes()?;
                    self.changes.start(pos.clone(), local, KeepAll);
                    self.pos = Some(pos);
                    self.stage = Stage::Changes;
                }
                for (to, m) in out {
                    io.send(to, MstMsg::Bfs(m));
                }
            }
            Stage::Changes => {
                let mut out = Vec::new();
                let res = self.changes.round(&mut out)?;
                for (to, m) in out {
                    io.send(to, MstMsg::Changes(m));
                }
                if let Some(changes) = res {
                    io.mark_phase("changes");
                    self.begin_increments(&changes)?;
                }
            }
            Stage::Increments => {
                let mut out = Vec::new();
                let res = self.inc.round(&mut out)?;
                for (to, m) in out {
                    io.send(to, MstMsg::Increments(m));
                }
                if let Some(basis) = res {
                    io.mark_phase("increments");
                    let changes = self.changes.result().expect("broadcast finished").to_vec();
                    self.replay_increments(&basis, &changes)?;
                }
            }
            Stage::Decrements => {
                let mut out = Vec::new();
                let res = self.dec.round(&mut out)?;
                for (to, m) in out {
                    io.send(to, MstMsg::Decrements(m));
                }
                if let Some(basis) = res {
                    io.mark_phase("decrements");
                    self.replay_decrements(&basis)?;
                }
            }
            Stage::Done => {}
        }
        if self.stage == Stage::Done {
            self.aux = aux_from_restriction(self.me, &self.window)?;
        }
        Ok(())
    }
}

impl NodeProgram for MstUpdate {
    type Input = BatchInput<EttAux>;
    type State = MstState;
    type Msg = MstMsg;
    type Output = Result<EttAux, MstError>;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> MstState {
        MstState {
            me: ctx.id,
            n: ctx.n,
            labels: input.labels,
            aux: input.aux,
            stage: Stage::Exchange,
            window: EttRestriction::new(),
            bfs: BfsBuilder::new(ctx.id, ctx.n, ctx.neighbors),
            pos: None,
            changes: CastSlot::default(),
            inc: CastSlot::default(),
            dec: CastSlot::default(),
            contraction: None,
            dual: None,
            decreased: Vec::new(),
            error: None,
        }
    }

    fn step(&self, st: &mut MstState, io: &mut RoundIo<'_, MstMsg>) -> Status {
        if let Err(e) = st.step(io) {
            st.error = Some(e);
            return Status::Halt;
        }
        if st.stage == Stage::Done {
            Status::Halt
        } else {
            Status::Continue
        }
    }

    fn finish(&self, st: MstState) -> Self::Output {
        match st.error {
            Some(e) => Err(e),
            None => Ok(st.aux),
        }
    }

    fn output_bits(&self, _out: &Self::Output, n: usize) -> u64 {
        EttAux::bit_size(n)
    }
}

/// Outcome of one batch.
#[derive(Debug, Clone)]
pub struct MstBatch {
    pub aux: Vec<EttAux>,
    pub metrics: Metrics,
    pub transcript: Vec<TranscriptLine>,
}

impl MstBatch {
    pub fn tree(&self) -> Result<BTreeSet<EdgeId>, EttError> {
        decode_tree(&self.aux)
    }
}

/// Runs one batch from `l1` to `l2`; fails up front if `l2` has no finite
/// spanning tree and afterwards with the first node error.
pub fn run_mst_batch(
    graph: &CommGraph,
    l1: &Labelling,
    l2: &Labelling,
    aux: Vec<EttAux>,
    config: &SimConfig,
) -> Result<MstBatch, MstError> {
    kruskal_mst(graph, l2)?;
    let res = run_batch(&MstUpdate, graph, l1, l2, aux, config)?;
    let aux = res.outputs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(MstBatch { aux, metrics: res.metrics, transcript: res.transcript })
}
