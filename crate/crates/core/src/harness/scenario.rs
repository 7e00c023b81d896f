//! Per-scenario state carried between batches, and the oracle checks.

use std::collections::VecDeque;

use super::{ExperimentConfig, HarnessError, Scenario};
use crate::cclique::matmul::{assemble, entries_of_batch};
use crate::cclique::{cc_universal_update, run_matmul_batch, run_triangle_batch, DynMatmul, MatrixRowAux};
use crate::clique::{enumerate_cliques, run_clique_batch, NeighborhoodView};
use crate::ett::EttAux;
use crate::graph::{BatchUpdate, CommGraph, EdgeId, Label, Labelling, NodeId, Weight};
use crate::mst::{bootstrap, run_mst_batch, MstError};
use crate::oracles::{
    apsp, bitmask_cliques, is_acyclic, kruskal_mst, matmul_reference, subgraph_diameter, triangle_reference, Dsu,
};
use crate::sim::{run_batch, Metrics, SimConfig, TranscriptLine};
use crate::universal::{local1_update, universal_update, RadiusRView};

pub(super) struct StepOutcome {
    pub metrics: Metrics,
    pub transcript: Vec<TranscriptLine>,
    pub mismatch: Option<String>,
}

pub(super) enum Runner {
    Mst(Vec<EttAux>),
    Cliques(Vec<NeighborhoodView>),
    Local1 { r: usize, views: Vec<RadiusRView> },
    Apsp(Vec<Labelling>),
    Diameter(Vec<Labelling>),
    CcUniversal(Vec<Labelling>),
    Matmul(Vec<MatrixRowAux>),
    Triangles(Vec<MatrixRowAux>),
}

/// BFS distances from `s` in the labelled subgraph; what a node computes
/// locally once it knows the whole labelling.
fn subgraph_bfs(n: usize, labelling: &Labelling, s: NodeId) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in labelling.subgraph_edges() {
        adj[e.u.index()].push(e.v.index());
        adj[e.v.index()].push(e.u.index());
    }
    let mut dist = vec![None; n];
    dist[s.index()] = Some(0);
    let mut q = VecDeque::from([s.index()]);
    while let Some(x) = q.pop_front() {
        let d = dist[x].unwrap_or(0) + 1;
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(d);
                q.push_back(y);
            }
        }
    }
    dist
}

fn distances_at(g: &CommGraph, l: &Labelling, v: NodeId) -> Vec<Option<usize>> {
    subgraph_bfs(g.n(), l, v)
}

fn diameter_at(g: &CommGraph, l: &Labelling, _v: NodeId) -> usize {
    g.nodes().filter_map(|s| subgraph_bfs(g.n(), l, s).into_iter().flatten().max()).max().unwrap_or(0)
}

fn components_at(g: &CommGraph, l: &Labelling, _v: NodeId) -> usize {
    let mut dsu = Dsu::new(g.n());
    let merged = l.subgraph_edges().iter().filter(|e| dsu.union(e.u.index(), e.v.index())).count();
    g.n() - merged
}

fn subgraph_degree(view: &RadiusRView) -> usize {
    view.labels.iter().filter(|(e, l)| e.touches(view.me) && l.bit() == Some(true)).count()
}

fn weight_of(l: Label) -> i64 {
    match l {
        Label::Bit(b) => i64::from(b),
        Label::Weight(Weight::Finite(w)) => w,
        Label::Weight(Weight::Infinite) => 0,
    }
}

fn weighted_adjacency(g: &CommGraph, l: &Labelling) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0; g.n()]; g.n()];
    for (e, x) in l.iter() {
        a[e.u.index()][e.v.index()] = weight_of(x);
        a[e.v.index()][e.u.index()] = weight_of(x);
    }
    a
}

fn weighted_entries(batch: &BatchUpdate) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for (e, l) in batch.iter() {
        out.push((e.u.index(), e.v.index(), weight_of(l)));
        out.push((e.v.index(), e.u.index(), weight_of(l)));
    }
    out
}

impl Runner {
    pub fn new(config: &ExperimentConfig, g: &CommGraph, l0: &Labelling) -> Result<Self, HarnessError> {
        let n = g.n();
        Ok(match config.scenario {
            Scenario::Mst => Runner::Mst(bootstrap(g, l0)?),
            Scenario::Cliques => Runner::Cliques(NeighborhoodView::all(g, l0)),
            Scenario::Local1 => {
                if !(1..=255).contains(&config.radius) {
                    return Err(super::config_err("radius must be in 1..=255"));
                }
                Runner::Local1 { r: config.radius, views: RadiusRView::all(g, l0, config.radius) }
            }
            Scenario::UniversalApsp => Runner::Apsp(vec![l0.clone(); n]),
            Scenario::UniversalDiameter => Runner::Diameter(vec![l0.clone(); n]),
            Scenario::CcUniversal => Runner::CcUniversal(vec![l0.clone(); n]),
            Scenario::CcMatmul => {
                let a = weighted_adjacency(g, l0);
                Runner::Matmul(MatrixRowAux::from_matrices(&a, &a))
            }
            Scenario::CcTriangles => {
                let a = weighted_adjacency(g, l0);
                Runner::Triangles(MatrixRowAux::from_matrices(&a, &a))
            }
        })
    }

    pub fn step(
        &mut self,
        g: &CommGraph,
        l1: &Labelling,
        l2: &Labelling,
        batch: &BatchUpdate,
        index: u64,
        cfg: &SimConfig,
    ) -> Result<StepOutcome, HarnessError> {
        let n = g.n();
        let (metrics, transcript, mismatch) = match self {
            Runner::Mst(aux) => {
                let res = run_mst_batch(g, l1, l2, std::mem::take(aux), cfg)?;
                let got = res.tree().map_err(MstError::from)?;
                let want = kruskal_mst(g, l2).map_err(MstError::from)?;
                let mismatch = (got != want).then(|| {
                    let extra: Vec<EdgeId> = got.difference(&want).copied().collect();
                    let missing: Vec<EdgeId> = want.difference(&got).copied().collect();
                    format!("tree differs from Kruskal: extra {extra:?}, missing {missing:?}")
                });
                *aux = res.aux;
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Cliques(views) => {
                let res = run_clique_batch(g, l1, l2, std::mem::take(views), cfg)?;
                let mut mismatch = res
                    .outputs
                    .iter()
                    .position(|o| o.view != NeighborhoodView::from_labelling(g, l2, o.view.me))
                    .map(|v| format!("node {v} holds a stale neighbourhood"));
                let sub = l2.subgraph_edges();
                for k in [3, 4] {
                    let want = bitmask_cliques(n, &sub, k);
                    for (v, o) in res.outputs.iter().enumerate() {
                        if mismatch.is_none() && enumerate_cliques(&o.view, k).ok().as_ref() != Some(&want[v]) {
                            mismatch = Some(format!("node {v} lists wrong {k}-cliques"));
                        }
                    }
                }
                let arcs: Vec<(NodeId, NodeId)> = res
                    .outputs
                    .iter()
                    .enumerate()
                    .flat_map(|(v, o)| {
                        let v = NodeId::from(v);
                        o.orientation.out_edges.iter().map(move |e| (v, e.other(v)))
                    })
                    .collect();
                let alpha = batch.alpha() as f64;
                let max_out = res.outputs.iter().map(|o| o.orientation.out_edges.len()).max().unwrap_or(0);
                if mismatch.is_none() && (arcs.len() != batch.alpha() || !is_acyclic(n, &arcs)) {
                    mismatch = Some("changed edges are not acyclically oriented".into());
                }
                if mismatch.is_none() && max_out as f64 > 6.0 * alpha.sqrt() + 1e-9 {
                    mismatch = Some(format!("outdegree {max_out} exceeds 6·√α"));
                }
                *views = res.outputs.into_iter().map(|o| o.view).collect();
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Local1 { r, views } => {
                let prog = local1_update(*r, subgraph_degree);
                let res = run_batch(&prog, g, l1, l2, std::mem::take(views), cfg)?;
                let mut mismatch = None;
                for (v, o) in res.outputs.iter().enumerate() {
                    let want = RadiusRView::from_labelling(g, l2, NodeId::from(v), *r);
                    let degree = l2.subgraph_edges().iter().filter(|e| e.touches(NodeId::from(v))).count();
                    if mismatch.is_none() && (o.view != want || o.output != degree) {
                        mismatch = Some(format!("node {v} disagrees with its radius-{r} neighbourhood"));
                    }
                }
                *views = res.outputs.into_iter().map(|o| o.view).collect();
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Apsp(stored) => {
                let prog = universal_update(g, distances_at);
                let res = run_batch(&prog, g, l1, l2, std::mem::take(stored), cfg)?;
                let want = apsp(n, &l2.subgraph_edges());
                let mismatch = (0..n).find(|&v| res.outputs[v].output != want[v]).map(|v| format!("node {v} has wrong distances"));
                *stored = res.outputs.into_iter().map(|o| o.labelling).collect();
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Diameter(stored) => {
                let prog = universal_update(g, diameter_at);
                let res = run_batch(&prog, g, l1, l2, std::mem::take(stored), cfg)?;
                let want = subgraph_diameter(n, &l2.subgraph_edges());
                let mismatch = res
                    .outputs
                    .iter()
                    .position(|o| o.output != want)
                    .map(|v| format!("node {v} reports diameter {}, expected {want}", res.outputs[v].output));
                *stored = res.outputs.into_iter().map(|o| o.labelling).collect();
                (res.metrics, res.transcript, mismatch)
            }
            Runner::CcUniversal(stored) => {
                let prog = cc_universal_update(g, components_at);
                let res = run_batch(&prog, g, l1, l2, std::mem::take(stored), cfg)?;
                let mut dsu = Dsu::new(n);
                let want = n - l2.subgraph_edges().iter().filter(|e| dsu.union(e.u.index(), e.v.index())).count();
                let mismatch = res
                    .outputs
                    .iter()
                    .position(|o| o.output != want || &o.labelling != l2)
                    .map(|v| format!("node {v} reports {} components, expected {want}", res.outputs[v].output));
                *stored = res.outputs.into_iter().map(|o| o.labelling).collect();
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Matmul(aux) => {
                let changes = weighted_entries(batch);
                let res = run_matmul_batch(
                    g,
                    &DynMatmul::default(),
                    std::mem::take(aux),
                    &changes,
                    &changes,
                    Some(index),
                    cfg,
                )?;
                *aux = res.outputs.into_iter().map(|o| o.aux).collect();
                let (s, t, p) = assemble(aux);
                let a = weighted_adjacency(g, l2);
                let mismatch = if s != a || t != a {
                    Some("stored factors differ from the labelling".into())
                } else if p != matmul_reference(&s, &t) {
                    Some("stored product differs from S·T".into())
                } else {
                    None
                };
                (res.metrics, res.transcript, mismatch)
            }
            Runner::Triangles(aux) => {
                let res = run_triangle_batch(g, std::mem::take(aux), &entries_of_batch(batch), cfg)?;
                let want = triangle_reference(&weighted_adjacency(g, l2)) as i64;
                let mismatch = res
                    .outputs
                    .iter()
                    .position(|o| o.triangles != Some(want))
                    .map(|v| format!("node {v} counts {:?} triangles, expected {want}", res.outputs[v].triangles));
                *aux = res.outputs.into_iter().map(|o| o.aux).collect();
                (res.metrics, res.transcript, mismatch)
            }
        };
        Ok(StepOutcome { metrics, transcript, mismatch })
    }
}
