//! Deterministic graph, labelling and batch generators.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{apply_batch, BatchUpdate, CommGraph, EdgeId, GraphError, Label, Labelling, NodeId, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn infeasible(msg: impl Into<String>) -> GenError {
    GenError::InfeasibleParams(msg.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path,
    Cycle,
    Star,
    /// Near-square grid; `n` must factor as `rows × cols` with `rows ≥ 2`.
    Grid,
    /// Square torus `k × k`, `n = k²`.
    Torus,
    /// Square torus times an edge, `n = 2k²`.
    TorusPrism,
    /// Connected `G(n, m)`: random spanning tree plus uniform extra edges.
    RandomGnm { m: usize },
    Clique,
}

impl FromStr for GraphKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        Ok(match s {
            "path" => GraphKind::Path,
            "cycle" => GraphKind::Cycle,
            "star" => GraphKind::Star,
            "grid" => GraphKind::Grid,
            "torus" => GraphKind::Torus,
            "torus-prism" => GraphKind::TorusPrism,
            "random-gnm" | "gnm" => GraphKind::RandomGnm { m: 0 },
            "clique" => GraphKind::Clique,
            other => return Err(infeasible(format!("unknown graph kind `{other}`"))),
        })
    }
}

pub fn path(n: usize) -> Result<CommGraph, GenError> {
    Ok(CommGraph::new(n, (1..n).map(|i| (i - 1, i)))?)
}

pub fn cycle(n: usize) -> Result<CommGraph, GenError> {
    if n < 3 {
        return Err(infeasible("cycle needs n >= 3"));
    }
    Ok(CommGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))?)
}

pub fn star(n: usize) -> Result<CommGraph, GenError> {
    Ok(CommGraph::new(n, (1..n).map(|i| (0, i)))?)
}

pub fn clique(n: usize) -> Result<CommGraph, GenError> {
    Ok(CommGraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))?)
}

pub fn grid(rows: usize, cols: usize) -> Result<CommGraph, GenError> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Ok(CommGraph::new(rows * cols, edges)?)
}

fn torus_edges(rows: usize, cols: usize, offset: usize) -> Vec<(usize, usize)> {
    let id = |r: usize, c: usize| offset + r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            edges.push((id(r, c), id(r, (c + 1) % cols)));
            edges.push((id(r, c), id((r + 1) % rows, c)));
        }
    }
    edges
}

pub fn torus(rows: usize, cols: usize) -> Result<CommGraph, GenError> {
    if rows < 3 || cols < 3 {
        return Err(infeasible("torus needs both sides >= 3"));
    }
    Ok(CommGraph::new(rows * cols, torus_edges(rows, cols, 0))?)
}

/// Two copies of a torus joined node-by-node; diameter grows by one.
pub fn torus_prism(rows: usize, cols: usize) -> Result<CommGraph, GenError> {
    if rows < 3 || cols < 3 {
        return Err(infeasible("torus needs both sides >= 3"));
    }
    let k = rows * cols;
    let mut edges = torus_edges(rows, cols, 0);
    edges.extend(torus_edges(rows, cols, k));
    edges.extend((0..k).map(|i| (i, i + k)));
    Ok(CommGraph::new(2 * k, edges)?)
}

/// Connected random graph with exactly `m` edges.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Result<CommGraph, GenError> {
    if n < 2 || m < n - 1 || m > n * (n - 1) / 2 {
        return Err(infeasible(format!("gnm needs n-1 <= m <= n(n-1)/2, got n={n} m={m}")));
    }
    let mut rng = rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.insert(EdgeId::of(order[i], order[j]));
    }
    if m > n * (n - 1) / 4 {
        // dense: sample the complement instead of rejecting
        let mut rest: Vec<EdgeId> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| EdgeId::of(i, j)))
            .filter(|e| !edges.contains(e))
            .collect();
        rest.shuffle(&mut rng);
        edges.extend(rest.into_iter().take(m - (n - 1)));
    } else {
        while edges.len() < m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.insert(EdgeId::of(a, b));
            }
        }
    }
    Ok(CommGraph::new(n, edges.into_iter().map(|e| (e.u.index(), e.v.index())))?)
}

/// `base` with a path of `tail` extra nodes hanging off node `n − 1`.
pub fn with_tail(base: &CommGraph, tail: usize) -> Result<CommGraph, GenError> {
    let n = base.n();
    let mut edges: Vec<(usize, usize)> = base.edges().iter().map(|e| (e.u.index(), e.v.index())).collect();
    let mut prev = n - 1;
    for i in 0..tail {
        edges.push((prev, n + i));
        prev = n + i;
    }
    Ok(CommGraph::new(n + tail, edges)?)
}

fn square_side(n: usize) -> Option<usize> {
    let k = (n as f64).sqrt().round() as usize;
    (k * k == n).then_some(k)
}

pub fn generate_graph(kind: GraphKind, n: usize, seed: u64) -> Result<CommGraph, GenError> {
    match kind {
        GraphKind::Path => path(n),
        GraphKind::Cycle => cycle(n),
        GraphKind::Star => star(n),
        GraphKind::Clique => clique(n),
        GraphKind::Grid => {
            let rows = (2..=n).take_while(|r| r * r <= n).filter(|r| n % r == 0).last();
            let rows = rows.ok_or_else(|| infeasible(format!("grid needs a composite n, got {n}")))?;
            grid(rows, n / rows)
        }
        GraphKind::Torus => {
            let k = square_side(n).ok_or_else(|| infeasible("torus needs a square n"))?;
            torus(k, k)
        }
        GraphKind::TorusPrism => {
            let k = (n % 2 == 0).then(|| square_side(n / 2)).flatten();
            let k = k.ok_or_else(|| infeasible("torus-prism needs n = 2k²"))?;
            torus_prism(k, k)
        }
        GraphKind::RandomGnm { m } => {
            let m = if m == 0 { 2 * n } else { m };
            random_gnm(n, m.min(n * (n - 1) / 2), seed)
        }
    }
}

/// Label alphabet used when generating labellings and batches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelDomain {
    /// Subgraph membership; initial density `p`.
    Bits { p: f64 },
    /// Weights in `[0, max]`; `inf_rate` is the chance of an infinite label.
    Weights { max: i64, inf_rate: f64 },
}

impl LabelDomain {
    /// Weights capped at `n^C`.
    pub fn weights_for(n: usize, exponent: u32) -> Self {
        let max = (n as i64).saturating_pow(exponent).max(1);
        LabelDomain::Weights { max, inf_rate: 0.0 }
    }
}

fn random_label(domain: LabelDomain, rng: &mut ChaCha8Rng) -> Label {
    match domain {
        LabelDomain::Bits { p } => Label::Bit(rng.gen_bool(p.clamp(0.0, 1.0))),
        LabelDomain::Weights { max, inf_rate } => {
            if inf_rate > 0.0 && rng.gen_bool(inf_rate.clamp(0.0, 1.0)) {
                Label::Weight(Weight::Infinite)
            } else {
                Label::w(rng.gen_range(0..=max))
            }
        }
    }
}

pub fn random_labelling(graph: &CommGraph, domain: LabelDomain, seed: u64) -> Labelling {
    let mut rng = rng(seed);
    let domain = match domain {
        LabelDomain::Weights { max, .. } => LabelDomain::Weights { max, inf_rate: 0.0 },
        d => d,
    };
    let labels: BTreeMap<EdgeId, Label> = graph.edges().iter().map(|e| (*e, random_label(domain, &mut rng))).collect();
    Labelling::new(graph, labels).expect("covers every edge")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaDist {
    /// Every batch has exactly `α` changes.
    Fixed,
    /// Batch sizes uniform in `1..=α`.
    Uniform,
}

impl FromStr for AlphaDist {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "fixed" => Ok(AlphaDist::Fixed),
            "uniform" => Ok(AlphaDist::Uniform),
            other => Err(infeasible(format!("unknown batch kind `{other}`"))),
        }
    }
}

/// Whether the finite-weight edges span the graph.
pub fn finite_spanning(graph: &CommGraph, labelling: &Labelling) -> bool {
    let mut dsu = crate::oracles::Dsu::new(graph.n());
    let mut joined = 0;
    for (e, l) in labelling.iter() {
        if l.weight().is_some_and(Weight::is_finite) && dsu.union(e.u.index(), e.v.index()) {
            joined += 1;
        }
    }
    joined + 1 == graph.n()
}

/// Generates `count` batches starting from `initial`. Every change differs
/// from the label current at its batch, and with weights the finite edges
/// stay spanning (an infinite label that would disconnect is redrawn finite).
pub fn generate_batches(
    graph: &CommGraph,
    initial: &Labelling,
    dist: AlphaDist,
    alpha: usize,
    count: usize,
    domain: LabelDomain,
    seed: u64,
) -> Result<Vec<BatchUpdate>, GenError> {
    if alpha > graph.m() {
        return Err(infeasible(format!("alpha {alpha} exceeds m = {}", graph.m())));
    }
    let mut rng = rng(seed);
    let mut current = initial.clone();
    let mut out = Vec::with_capacity(count);
    let edges = graph.edges();
    for _ in 0..count {
        let size = match dist {
            AlphaDist::Fixed => alpha,
            AlphaDist::Uniform => rng.gen_range(1..=alpha.max(1)).min(alpha),
        };
        let chosen: Vec<EdgeId> = edges.choose_multiple(&mut rng, size).copied().collect();
        let mut batch = BatchUpdate::new();
        let mut trial = current.clone();
        for e in chosen {
            let old = current.label(e);
            let new = loop {
                let cand = match (domain, old) {
                    (LabelDomain::Bits { .. }, Label::Bit(b)) => Label::Bit(!b),
                    _ => random_label(domain, &mut rng),
                };
                if cand == old {
                    continue;
                }
                if cand == Label::Weight(Weight::Infinite) {
                    trial.set(e, cand);
                    if !finite_spanning(graph, &trial) {
                        trial.set(e, old);
                        continue;
                    }
                }
                break cand;
            };
            trial.set(e, new);
            batch.push(e, new)?;
        }
        current = apply_batch(&current, &batch)?.0;
        out.push(batch);
    }
    Ok(out)
}

/// Batch setting every edge of the `k`-clique on nodes `0..k` to `label`
/// (skipping edges already carrying it).
pub fn clique_batch(graph: &CommGraph, current: &Labelling, nodes: &[NodeId], label: Label) -> BatchUpdate {
    let mut batch = BatchUpdate::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            let e = EdgeId::new(a, b);
            if graph.contains(e) && current.label(e) != label {
                batch.push(e, label).expect("distinct pairs");
            }
        }
    }
    batch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::io::format_graph;

    #[test]
    fn path_five_has_four_edges() {
        assert_eq!(path(5).unwrap().m(), 4);
    }

    #[test]
    fn gnm_is_reproducible() {
        let a = random_gnm(20, 40, 7).unwrap();
        let b = random_gnm(20, 40, 7).unwrap();
        assert_eq!(a.m(), 40);
        assert_eq!(format_graph(&a), format_graph(&b));
        assert_ne!(format_graph(&a), format_graph(&random_gnm(20, 40, 8).unwrap()));
    }

    #[test]
    fn fixed_batches_have_exact_size() {
        let g = random_gnm(30, 80, 1).unwrap();
        let l = random_labelling(&g, LabelDomain::Bits { p: 0.3 }, 2);
        let batches = generate_batches(&g, &l, AlphaDist::Fixed, 8, 20, LabelDomain::Bits { p: 0.3 }, 3).unwrap();
        let mut cur = l;
        for b in &batches {
            assert_eq!(b.alpha(), 8);
            cur = apply_batch(&cur, b).unwrap().0;
        }
    }

    #[test]
    fn weight_batches_keep_finite_spanning() {
        let g = random_gnm(12, 20, 4).unwrap();
        let dom = LabelDomain::Weights { max: 50, inf_rate: 0.5 };
        let l = random_labelling(&g, dom, 5);
        let batches = generate_batches(&g, &l, AlphaDist::Uniform, 6, 50, dom, 6).unwrap();
        let mut cur = l;
        for b in &batches {
            assert!((1..=6).contains(&b.alpha()));
            cur = apply_batch(&cur, b).unwrap().0;
            assert!(finite_spanning(&g, &cur));
        }
    }

    #[test]
    fn torus_diameters() {
        assert_eq!(torus(10, 10).unwrap().diameter(), 10);
        assert_eq!(torus_prism(10, 10).unwrap().diameter(), 11);
        assert_eq!(generate_graph(GraphKind::Grid, 12, 0).unwrap().m(), 17);
    }
}
