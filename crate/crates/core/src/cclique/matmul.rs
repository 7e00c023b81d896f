//! Dynamic matrix multiplication and triangle counting on the clique.
//!
//! Node `v` holds row `v` of `S`, column `v` of `T` and row `v` of
//! `P = S·T`. For a batch with sparse changes `ΔS`, `ΔT`:
//!
//! `P₂ = P₁ + S₁·ΔT + ΔS·T₂`
//!
//! Both deltas are all-cast. Row `v` of `S₁·ΔT` is local to `v`; column `j`
//! of `ΔS·T₂` is local to `j`, which routes each nonzero entry to its row
//! owner.

use std::collections::BTreeMap;

use rand::Rng;

use super::route::{AllCast, CcMsg, Router};
use super::{require_clique, CcError};
use crate::graph::{bits_for, BatchUpdate, CommGraph, NodeId};
use crate::primitives::Item;
use crate::sim::{run, NodeCtx, NodeProgram, RoundIo, RunResult, SimConfig, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Which {
    S,
    T,
}

/// One nonzero of `ΔS` or `ΔT`, as an additive change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaEntry {
    pub which: Which,
    pub i: u32,
    pub j: u32,
    pub delta: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatItem {
    Delta(DeltaEntry),
    /// An entry of `ΔS·T₂` in the sender's column.
    Correction(i64),
}

fn value_bits(x: i64) -> u32 {
    1 + bits_for(x.unsigned_abs())
}

impl Item for MatItem {
    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            MatItem::Delta(d) => 1 + 2 * id_bits + value_bits(d.delta),
            MatItem::Correction(c) => value_bits(*c),
        }
    }
}

/// Row `v` of `S`, column `v` of `T`, row `v` of `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRowAux {
    pub s_row: Vec<i64>,
    pub t_col: Vec<i64>,
    pub p_row: Vec<i64>,
}

impl MatrixRowAux {
    /// Per-node aux for dense `s` and `t`, with the product computed here.
    pub fn from_matrices(s: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<MatrixRowAux> {
        let n = s.len();
        (0..n)
            .map(|v| MatrixRowAux {
                s_row: s[v].clone(),
                t_col: (0..n).map(|k| t[k][v]).collect(),
                p_row: (0..n).map(|j| (0..n).map(|k| s[v][k] * t[k][j]).sum()).collect(),
            })
            .collect()
    }

    pub fn bit_size(&self) -> u64 {
        self.s_row.iter().chain(&self.t_col).chain(&self.p_row).map(|&x| u64::from(value_bits(x))).sum()
    }
}

/// Reassembles `(S, T, P)` from all nodes' aux.
pub fn assemble(aux: &[MatrixRowAux]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = aux.len();
    let s = aux.iter().map(|a| a.s_row.clone()).collect();
    let t = (0..n).map(|k| (0..n).map(|j| aux[j].t_col[k]).collect()).collect();
    let p = aux.iter().map(|a| a.p_row.clone()).collect();
    (s, t, p)
}

/// Dense reference product, used for spot checks.
pub fn dense_product(s: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = s.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| s[i][k] * t[k][j]).sum()).collect()).collect()
}

/// A node's input: its aux and the new values in its row of `S` and its
/// column of `T`.
#[derive(Debug, Clone)]
pub struct MatInput {
    pub aux: MatrixRowAux,
    /// `(column, new value)` in row `v` of `S`.
    pub s_new: Vec<(usize, i64)>,
    /// `(row, new value)` in column `v` of `T`.
    pub t_new: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatOutput {
    pub aux: MatrixRowAux,
    /// Global triangle count when counting is on.
    pub triangles: Option<i64>,
}

/// The update program; with `triangles` set, `S = T = A` is an adjacency
/// matrix and the nodes also agree on the triangle count.
#[derive(Debug, Clone, Copy, Default)]
pub struct DynMatmul {
    pub triangles: bool,
}

pub fn triangle_count_update() -> DynMatmul {
    DynMatmul { triangles: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Cast,
    Route,
    Total,
    Done,
}

#[derive(Debug)]
pub struct MatState {
    me: NodeId,
    n: usize,
    aux: MatrixRowAux,
    stage: Stage,
    cast: AllCast<MatItem>,
    router: Option<Router<MatItem>>,
    totals: Vec<i64>,
    own_total: Option<i64>,
    triangles: Option<i64>,
}

impl MatState {
    fn apply_deltas(&mut self, items: &[MatItem]) -> Vec<(NodeId, MatItem)> {
        let me = self.me.index();
        let mut ds: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
        let mut dt = Vec::new();
        for it in items {
            let MatItem::Delta(d) = it else { continue };
            match d.which {
                Which::S => ds.entry(d.i as usize).or_default().push((d.j as usize, d.delta)),
                Which::T => dt.push((d.i as usize, d.j as usize, d.delta)),
            }
        }
        // row v of S₁·ΔT, before S changes
        for &(k, j, delta) in &dt {
            self.aux.p_row[j] += self.aux.s_row[k] * delta;
        }
        for &(k, j, delta) in &dt {
            if j == me {
                self.aux.t_col[k] += delta;
            }
        }
        if let Some(row) = ds.get(&me) {
            for &(k, delta) in row {
                self.aux.s_row[k] += delta;
            }
        }
        // column v of ΔS·T₂, one entry per changed row of S
        let mut demands = Vec::new();
        for (&i, row) in &ds {
            let c: i64 = row.iter().map(|&(k, delta)| delta * self.aux.t_col[k]).sum();
            if c != 0 {
                demands.push((NodeId::from(i), MatItem::Correction(c)));
            }
        }
        demands
    }
}

impl NodeProgram for DynMatmul {
    type Input = MatInput;
    type State = MatState;
    type Msg = CcMsg<MatItem>;
    type Output = MatOutput;

    fn init(&self, ctx: &NodeCtx<'_>, input: MatInput) -> MatState {
        let v = ctx.id.index();
        let mut own = Vec::new();
        for &(j, x) in &input.s_new {
            let delta = x - input.aux.s_row[j];
            if delta != 0 {
                own.push(MatItem::Delta(DeltaEntry { which: Which::S, i: v as u32, j: j as u32, delta }));
            }
        }
        for &(i, x) in &input.t_new {
            let delta = x - input.aux.t_col[i];
            if delta != 0 {
                own.push(MatItem::Delta(DeltaEntry { which: Which::T, i: i as u32, j: v as u32, delta }));
            }
        }
        MatState {
            me: ctx.id,
            n: ctx.n,
            aux: input.aux,
            stage: Stage::Cast,
            cast: AllCast::new(ctx.id, ctx.n, own),
            router: None,
            totals: Vec::new(),
            own_total: None,
            triangles: None,
        }
    }

    fn step(&self, st: &mut MatState, io: &mut RoundIo<'_, Self::Msg>) -> Status {
        for (from, m) in io.inbox() {
            match m {
                CcMsg::Total(t) => st.totals.push(*t),
                CcMsg::CastCount(_) | CcMsg::Spread(_) | CcMsg::Cast(_) => st.cast.receive(*from, m),
                _ => st.router.as_mut().expect("routing started").receive(m),
            }
        }
        let mut out = Vec::new();
        if st.stage == Stage::Cast {
            if let Some(items) = st.cast.round(&mut out) {
                io.mark_phase("allcast");
                let demands = st.apply_deltas(&items);
                st.router = Some(Router::new(st.me, st.n, demands));
                st.stage = Stage::Route;
            }
        }
        if st.stage == Stage::Route {
            if let Some(delivered) = st.router.as_mut().expect("started").round(&mut out) {
                io.mark_phase("route");
                for (src, item) in delivered {
                    if let MatItem::Correction(c) = item {
                        st.aux.p_row[src.index()] += c;
                    }
                }
                st.stage = if self.triangles { Stage::Total } else { Stage::Done };
            }
        } else if st.stage == Stage::Total && st.own_total.is_none() {
            // links are free now that routing has drained
            let t: i64 = st.aux.p_row.iter().zip(&st.aux.s_row).map(|(p, a)| p * a).sum();
            for u in io.neighbors() {
                out.push((*u, CcMsg::Total(t)));
            }
            st.own_total = Some(t);
        }
        for (to, m) in out {
            io.send(to, m);
        }
        if let (Stage::Total, Some(t)) = (st.stage, st.own_total) {
            if st.totals.len() + 1 == st.n {
                st.triangles = Some((st.totals.iter().sum::<i64>() + t) / 6);
                io.mark_phase("total");
                st.stage = Stage::Done;
            }
        }
        if st.stage == Stage::Done {
            Status::Halt
        } else {
            Status::Continue
        }
    }

    fn finish(&self, st: MatState) -> MatOutput {
        MatOutput { aux: st.aux, triangles: st.triangles }
    }

    fn output_bits(&self, out: &MatOutput, _n: usize) -> u64 {
        out.aux.bit_size()
    }
}

/// Distributes `(i, j, new)` changes of `S` and `T` to their owners and
/// runs one batch. With `verify`, one random stored row of `P` is checked
/// against `S·T` first.
pub fn run_matmul_batch(
    graph: &CommGraph,
    program: &DynMatmul,
    aux: Vec<MatrixRowAux>,
    s_changes: &[(usize, usize, i64)],
    t_changes: &[(usize, usize, i64)],
    verify: Option<u64>,
    config: &SimConfig,
) -> Result<RunResult<MatOutput>, CcError> {
    require_clique(graph)?;
    let n = graph.n();
    if aux.len() != n {
        return Err(CcError::Matrix(format!("expected {n} rows, got {}", aux.len())));
    }
    if let Some(seed) = verify {
        let r = crate::harness::gen::rng(seed).gen_range(0..n);
        let (s, t, p) = assemble(&aux);
        let row: Vec<i64> = (0..n).map(|j| (0..n).map(|k| s[r][k] * t[k][j]).sum()).collect();
        if row != p[r] {
            return Err(CcError::InconsistentAux(r));
        }
    }
    let mut inputs: Vec<MatInput> =
        aux.into_iter().map(|aux| MatInput { aux, s_new: Vec::new(), t_new: Vec::new() }).collect();
    for &(i, j, x) in s_changes {
        check_index(i, j, n)?;
        inputs[i].s_new.push((j, x));
    }
    for &(i, j, x) in t_changes {
        check_index(i, j, n)?;
        inputs[j].t_new.push((i, x));
    }
    Ok(run(program, graph, inputs, config)?)
}

fn check_index(i: usize, j: usize, n: usize) -> Result<(), CcError> {
    if i >= n || j >= n {
        return Err(CcError::Matrix(format!("entry ({i},{j}) outside a {n}x{n} matrix")));
    }
    Ok(())
}

/// Adjacency changes `(i, j, new)` of a triangle-counting batch. Every
/// off-diagonal change needs its mirror with the same value.
pub fn triangle_batch(changes: &[(usize, usize, i64)]) -> Result<Vec<(usize, usize, i64)>, CcError> {
    let map: BTreeMap<(usize, usize), i64> = changes.iter().map(|&(i, j, x)| ((i, j), x)).collect();
    for (&(i, j), &x) in &map {
        if i == j || map.get(&(j, i)) != Some(&x) {
            return Err(CcError::AsymmetricBatch(i, j));
        }
    }
    Ok(map.into_iter().map(|((i, j), x)| (i, j, x)).collect())
}

/// Both matrix entries of every changed edge of a subgraph batch.
pub fn entries_of_batch(batch: &BatchUpdate) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for (e, l) in batch.iter() {
        let x = i64::from(l.bit().unwrap_or(false));
        out.push((e.u.index(), e.v.index(), x));
        out.push((e.v.index(), e.u.index(), x));
    }
    out
}

/// One triangle-counting batch over adjacency aux (`S = T = A`).
pub fn run_triangle_batch(
    graph: &CommGraph,
    aux: Vec<MatrixRowAux>,
    changes: &[(usize, usize, i64)],
    config: &SimConfig,
) -> Result<RunResult<MatOutput>, CcError> {
    let changes = triangle_batch(changes)?;
    run_matmul_batch(graph, &triangle_count_update(), aux, &changes, &changes, None, config)
}
