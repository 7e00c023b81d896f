//! The two matroids behind spanning tree repair, their local independence
//! tests, and the distributed extreme-weight basis.
//!
//! Both matroids are defined relative to an Euler tour labelled spanning
//! tree `T`. Elements are [`Decoration`]s: an edge with its window of the
//! tour labelling and its old and new weights. Anyone holding the
//! decorations of the fixed edge set (`E⁺` or `E⁻`) and of a candidate set
//! decides independence without communication.
//!
//! * [`Contraction`]: `I` is independent iff `(T \ E⁺) ∪ I` is acyclic.
//! * [`Dual`]: over `B = T ∪ E⁻`, `J` is independent iff `B \ J` still
//!   spans.
//!
//! The extreme basis is computed by a filtered convergecast: every node
//! forwards, in key order, only the elements greedy keeps over everything it
//! has seen, so no node forwards more than `rank` elements.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;
use std::marker::PhantomData;

use thiserror::Error;

use crate::ett::{EdgeLabels, EttError, EttRestriction, NodeInfo};
use crate::graph::{bits_for, EdgeId, NodeId, Weight};
use crate::primitives::{BfsBuilder, CastError, CastSlot, Item, PrimMsg, Retain, TreePosition};
use crate::sim::{NodeCtx, NodeProgram, RoundIo, Status};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("basis has {got} elements, expected rank {expected}")]
    BasisRankMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cast(#[from] CastError),
    #[error(transparent)]
    Ett(#[from] EttError),
}

/// An edge with its tour window and both weights; one message word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    pub edge: EdgeId,
    pub labels: EdgeLabels,
    pub info_u: NodeInfo,
    pub info_v: NodeInfo,
    pub w1: Weight,
    pub w2: Weight,
}

impl Decoration {
    pub fn from_window(window: &EttRestriction, e: EdgeId, w1: Weight, w2: Weight) -> Result<Self, EttError> {
        let missing = || EttError::InconsistentWindow(format!("edge {e} not in window"));
        Ok(Decoration {
            edge: e,
            labels: (window.label(e.u, e.v)?, window.label(e.v, e.u)?),
            info_u: *window.node(e.u).ok_or_else(missing)?,
            info_v: *window.node(e.v).ok_or_else(missing)?,
            w1,
            w2,
        })
    }

    pub fn is_tree_edge(&self) -> bool {
        matches!(self.labels, (Some(_), Some(_)))
    }

    pub fn add_to(&self, window: &mut EttRestriction) -> Result<(), EttError> {
        window.insert_node(self.edge.u, self.info_u)?;
        window.insert_node(self.edge.v, self.info_v)?;
        window.insert_edge(self.edge, self.labels)
    }

    /// Two ids, two labels, three node records and two weights.
    pub fn bits(&self, id_bits: u32) -> u32 {
        let label = |l: Option<u64>| l.map_or(1, bits_for);
        let info = |i: &NodeInfo| id_bits + bits_for(i.size) + bits_for(i.a);
        2 * id_bits
            + label(self.labels.0)
            + label(self.labels.1)
            + info(&self.info_u)
            + info(&self.info_v)
            + self.w1.bits()
            + self.w2.bits()
    }
}

/// Builds one window out of many decorations.
pub fn window_of<'a>(decos: impl IntoIterator<Item = &'a Decoration>) -> Result<EttRestriction, EttError> {
    let mut w = EttRestriction::new();
    for d in decos {
        d.add_to(&mut w)?;
    }
    Ok(w)
}

/// A decorated edge ordered by `(weight, edge)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub key: (Weight, EdgeId),
    pub deco: Decoration,
}

impl Element {
    pub fn new(weight: Weight, deco: Decoration) -> Self {
        Element { key: (weight, deco.edge), deco }
    }

    pub fn edge(&self) -> EdgeId {
        self.deco.edge
    }
}

impl Item for Element {
    fn bits(&self, id_bits: u32) -> u32 {
        self.deco.bits(id_bits)
    }
}

/// Anything carrying a decoration: [`Element`] for minimum bases and
/// `Reverse<Element>` for maximum ones.
pub trait Decorated {
    fn element(&self) -> &Element;
}

impl Decorated for Element {
    fn element(&self) -> &Element {
        self
    }
}

impl Decorated for Reverse<Element> {
    fn element(&self) -> &Element {
        &self.0
    }
}

/// Local independence oracle. A probe is whatever per-element summary the
/// test needs; computing it once per element keeps greedy filtering cheap.
pub trait Matroid: fmt::Debug + Send + Sync {
    type Probe: Clone + fmt::Debug + Send + Sync;

    fn probe(&self, d: &Decoration) -> Self::Probe;

    fn independent_probes(&self, set: &[Self::Probe]) -> bool;

    fn rank(&self) -> usize;

    fn independent(&self, set: &[Decoration]) -> bool {
        let probes: Vec<Self::Probe> = set.iter().map(|d| self.probe(d)).collect();
        self.independent_probes(&probes)
    }
}

/// `I` independent iff the tree minus the fixed edges plus `I` is acyclic.
#[derive(Debug, Clone)]
pub struct Contraction {
    base: EttRestriction,
    /// Tree edges among the fixed set, in key order.
    cut: Vec<EdgeId>,
}

impl Contraction {
    /// `fixed` are the decorations of the increased edges.
    pub fn new(fixed: &[Decoration]) -> Result<Self, EttError> {
        let mut tree: Vec<&Decoration> = fixed.iter().filter(|d| d.is_tree_edge()).collect();
        tree.sort_by_key(|d| (d.w2, d.edge));
        Ok(Contraction { base: window_of(fixed)?, cut: tree.iter().map(|d| d.edge).collect() })
    }

    pub fn cut_edges(&self) -> &[EdgeId] {
        &self.cut
    }

    /// The forest window with every fixed tree edge cut, extended by `extra`.
    pub fn forest_window(&self, extra: &[Decoration]) -> Result<EttRestriction, EttError> {
        let mut w = self.base.clone();
        for d in extra {
            d.add_to(&mut w)?;
        }
        for &e in &self.cut {
            w.cut(e)?;
        }
        Ok(w)
    }

    /// Joins `set` one by one into the cut forest; dependent as soon as an
    /// edge closes a cycle.
    pub fn check(&self, set: &[Decoration]) -> Result<bool, EttError> {
        let mut w = self.forest_window(set)?;
        for d in set {
            if w.root_of(d.edge.u)? == w.root_of(d.edge.v)? {
                return Ok(false);
            }
            w.join(d.edge)?;
        }
        Ok(true)
    }
}

impl Matroid for Contraction {
    /// Roots of the two endpoints' trees once the fixed tree edges are cut.
    type Probe = (NodeId, NodeId);

    fn probe(&self, d: &Decoration) -> (NodeId, NodeId) {
        let w = self.forest_window(std::slice::from_ref(d)).expect("decorations of one labelling");
        (w.root_of(d.edge.u).expect("in window"), w.root_of(d.edge.v).expect("in window"))
    }

    /// Acyclic on the forest's components.
    fn independent_probes(&self, set: &[(NodeId, NodeId)]) -> bool {
        let mut ids: Vec<NodeId> = set.iter().flat_map(|&(a, b)| [a, b]).collect();
        ids.sort_unstable();
        ids.dedup();
        let idx = |x: NodeId| ids.binary_search(&x).expect("listed");
        let mut dsu = crate::oracles::Dsu::new(ids.len());
        set.iter().all(|&(a, b)| dsu.union(idx(a), idx(b)))
    }

    fn rank(&self) -> usize {
        self.cut.len()
    }
}

/// Over `B = T ∪ E⁻`: `J` independent iff `B \ J` contains a spanning tree.
#[derive(Debug, Clone)]
pub struct Dual {
    base: EttRestriction,
    /// Decreased edges outside the tree, in key order.
    spare: Vec<EdgeId>,
}

impl Dual {
    /// `fixed` are the decorations of the decreased edges.
    pub fn new(fixed: &[Decoration]) -> Result<Self, EttError> {
        let mut spare: Vec<&Decoration> = fixed.iter().filter(|d| !d.is_tree_edge()).collect();
        spare.sort_by_key(|d| (d.w2, d.edge));
        Ok(Dual { base: window_of(fixed)?, spare: spare.iter().map(|d| d.edge).collect() })
    }

    /// Decreased edges outside the tree, in key order.
    pub fn spare_edges(&self) -> &[EdgeId] {
        &self.spare
    }

    /// Cuts the tree edges of `set`, then reconnects with the remaining
    /// decreased edges.
    pub fn check(&self, set: &[Decoration]) -> Result<bool, EttError> {
        let mut w = self.base.clone();
        for d in set {
            d.add_to(&mut w)?;
        }
        let removed: BTreeSet<EdgeId> = set.iter().map(|d| d.edge).collect();
        let mut cuts = 0;
        for d in set.iter().filter(|d| d.is_tree_edge()) {
            w.cut(d.edge)?;
            cuts += 1;
        }
        let mut joins = 0;
        for &e in self.spare.iter().filter(|e| !removed.contains(e)) {
            if joins == cuts {
                break;
            }
            if w.root_of(e.u)? != w.root_of(e.v)? {
                w.join(e)?;
                joins += 1;
            }
        }
        Ok(joins == cuts)
    }
}

impl Matroid for Dual {
    type Probe = Decoration;

    fn probe(&self, d: &Decoration) -> Decoration {
        *d
    }

    fn independent_probes(&self, set: &[Decoration]) -> bool {
        self.check(set).expect("decorations of one labelling")
    }

    fn rank(&self) -> usize {
        self.spare.len()
    }
}

impl<M: Matroid> Matroid for &M {
    type Probe = M::Probe;

    fn probe(&self, d: &Decoration) -> M::Probe {
        (**self).probe(d)
    }

    fn independent_probes(&self, set: &[M::Probe]) -> bool {
        (**self).independent_probes(set)
    }

    fn rank(&self) -> usize {
        (**self).rank()
    }
}

/// Greedy retention: keeps an element iff it is independent of everything
/// kept so far.
#[derive(Debug, Clone)]
pub struct GreedyFilter<M: Matroid> {
    matroid: M,
    kept: Vec<Decoration>,
    probes: Vec<M::Probe>,
    verify: bool,
}

impl<M: Matroid> GreedyFilter<M> {
    pub fn new(matroid: M) -> Self {
        GreedyFilter { matroid, kept: Vec::new(), probes: Vec::new(), verify: cfg!(debug_assertions) }
    }

    /// Re-checks every discarded element at the end of the stream.
    pub fn verifying(mut self, on: bool) -> Self {
        self.verify = on;
        self
    }

    pub fn kept(&self) -> &[Decoration] {
        &self.kept
    }
}

impl<M: Matroid, T: Decorated> Retain<T> for GreedyFilter<M> {
    fn admit(&mut self, item: &T) -> bool {
        if self.kept.len() >= self.matroid.rank() {
            return false;
        }
        let d = item.element().deco;
        self.probes.push(self.matroid.probe(&d));
        if self.matroid.independent_probes(&self.probes) {
            self.kept.push(d);
            true
        } else {
            self.probes.pop();
            false
        }
    }

    fn verify(&self, discarded: &[T]) -> Result<(), CastError> {
        if !self.verify {
            return Ok(());
        }
        let mut set = self.probes.clone();
        for d in discarded {
            set.push(self.matroid.probe(&d.element().deco));
            if self.matroid.independent_probes(&set) {
                return Err(CastError::FilterNotMonotone);
            }
            set.pop();
        }
        Ok(())
    }
}

/// Centralized greedy over the sorted union, the reference for the
/// distributed computation.
pub fn greedy_basis<T: Decorated + Ord + Clone>(matroid: &impl Matroid, elements: &[T]) -> Vec<T> {
    let mut sorted = elements.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept = Vec::new();
    let mut out = Vec::new();
    for x in sorted {
        kept.push(matroid.probe(&x.element().deco));
        if matroid.independent_probes(&kept) {
            out.push(x);
        } else {
            kept.pop();
        }
    }
    out
}

/// Standalone extreme-basis phase: BFS, then the filtered convergecast whose
/// root streams the basis back down. Items are [`Element`] for a minimum
/// basis and `Reverse<Element>` for a maximum one.
#[derive(Debug)]
pub struct ExtremeBasis<'m, M, T> {
    pub matroid: &'m M,
    _item: PhantomData<fn() -> T>,
}

impl<'m, M, T> ExtremeBasis<'m, M, T> {
    pub fn new(matroid: &'m M) -> Self {
        ExtremeBasis { matroid, _item: PhantomData }
    }
}

#[derive(Debug)]
pub struct BasisState<'m, M: Matroid, T> {
    bfs: BfsBuilder,
    local: Option<Vec<T>>,
    pos: Option<TreePosition>,
    slot: CastSlot<T, GreedyFilter<&'m M>>,
    basis: Option<Result<Vec<T>, CastError>>,
}

impl<'m, M: Matroid, T: Item + Decorated> NodeProgram for ExtremeBasis<'m, M, T> {
    type Input = Vec<T>;
    type State = BasisState<'m, M, T>;
    type Msg = PrimMsg<T>;
    type Output = Result<Vec<T>, CastError>;

    fn init(&self, ctx: &NodeCtx<'_>, local: Vec<T>) -> Self::State {
        BasisState {
            bfs: BfsBuilder::new(ctx.id, ctx.n, ctx.neighbors),
            local: Some(local),
            pos: None,
            slot: CastSlot::default(),
            basis: None,
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
                let local = st.local.take().unwrap_or_default();
                st.slot.start(pos.clone(), local, GreedyFilter::new(self.matroid));
                st.pos = Some(pos);
            }
            for (to, m) in out {
                io.send(to, PrimMsg::Bfs(m));
            }
            return Status::Continue;
        }
        let mut out = Vec::new();
        let res = st.slot.round(&mut out);
        for (to, m) in out {
            io.send(to, PrimMsg::Cast(m));
        }
        match res {
            Ok(None) => Status::Continue,
            Ok(Some(items)) => {
                io.mark_phase("basis");
                st.basis = Some(Ok(items));
                Status::Halt
            }
            Err(e) => {
                st.basis = Some(Err(e));
                Status::Halt
            }
        }
    }

    fn finish(&self, st: Self::State) -> Self::Output {
        st.basis.expect("halted with a result")
    }
}

/// Decorations read off a global forest, for tests and examples that need
/// them without running the full algorithm.
pub fn decorate_all(
    forest: &crate::ett::EulerTourForest,
    edges: impl IntoIterator<Item = (EdgeId, Weight, Weight)>,
) -> Vec<Decoration> {
    let mut out = Vec::new();
    for (e, w1, w2) in edges {
        let w = forest.restrict([e]);
        out.push(Decoration::from_window(&w, e, w1, w2).expect("edge in its own window"));
    }
    out
}

/// Node that owns an edge's element: its smaller endpoint.
pub fn owner(e: EdgeId) -> NodeId {
    e.u
}
