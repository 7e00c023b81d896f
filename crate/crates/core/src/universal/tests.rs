use std::collections::VecDeque;

use super::*;
use crate::graph::apply_batch;
use crate::graph::BatchUpdate;
use crate::harness::gen::{self, AlphaDist, LabelDomain};
use crate::oracles::{apsp, subgraph_diameter};
use crate::sim::{run_batch, SimConfig};
use proptest::prelude::*;

fn bfs_in_subgraph(labelling: &Labelling, n: usize, s: NodeId) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in labelling.subgraph_edges() {
        adj[e.u.index()].push(e.v);
        adj[e.v.index()].push(e.u);
    }
    let mut dist = vec![None; n];
    dist[s.index()] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x.index()] {
            if dist[y.index()].is_none() {
                dist[y.index()] = Some(dist[x.index()].unwrap() + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

fn distances(g: &CommGraph, l: &Labelling, v: NodeId) -> Vec<Option<usize>> {
    bfs_in_subgraph(l, g.n(), v)
}

fn eccentricity_max(g: &CommGraph, l: &Labelling, _v: NodeId) -> usize {
    g.nodes().filter_map(|s| distances(g, l, s).into_iter().flatten().max()).max().unwrap_or(0)
}

fn component_edges(g: &CommGraph, l: &Labelling, v: NodeId) -> usize {
    let d = distances(g, l, v);
    l.subgraph_edges().iter().filter(|e| d[e.u.index()].is_some()).count()
}

fn bit_batch(l: &Labelling, edges: &[EdgeId]) -> BatchUpdate {
    BatchUpdate::from_changes(edges.iter().map(|e| (*e, Label::Bit(!l.is_set(*e))))).unwrap()
}

fn universal_round(
    g: &CommGraph,
    l1: &Labelling,
    b: &BatchUpdate,
) -> (Labelling, crate::sim::RunResult<UniversalOutput<Vec<Option<usize>>>>) {
    let (l2, _) = apply_batch(l1, b).unwrap();
    let prog = universal_update(g, distances);
    let res = run_batch(&prog, g, l1, &l2, vec![l1.clone(); g.n()], &SimConfig::default()).unwrap();
    (l2, res)
}

#[test]
fn empty_batch_is_cheap() {
    let g = gen::random_gnm(30, 70, 2).unwrap();
    let l = gen::random_labelling(&g, LabelDomain::Bits { p: 0.5 }, 2);
    let prog = universal_update(&g, component_edges);
    let res = run_batch(&prog, &g, &l, &l, vec![l.clone(); g.n()], &SimConfig::default()).unwrap();
    for (v, out) in res.outputs.iter().enumerate() {
        assert_eq!(out.output, component_edges(&g, &l, NodeId::from(v)));
        assert_eq!(out.labelling, l);
    }
    assert!(res.metrics.rounds <= 4 * g.diameter() + 8);
}

#[test]
fn apsp_on_eight_nodes() {
    let g = gen::random_gnm(8, 16, 11).unwrap();
    let l = gen::random_labelling(&g, LabelDomain::Bits { p: 0.6 }, 11);
    let b = bit_batch(&l, &g.edges()[..2]);
    let (l2, res) = universal_round(&g, &l, &b);
    let reference = apsp(8, &l2.subgraph_edges());
    for (v, out) in res.outputs.iter().enumerate() {
        assert_eq!(out.output, reference[v]);
        assert_eq!(out.labelling, l2);
    }
}

#[test]
fn diameter_of_path_in_clique() {
    let g = gen::clique(8).unwrap();
    let l = Labelling::uniform(&g, Label::Bit(false));
    let path: Vec<EdgeId> = (0..5).map(|i| EdgeId::of(i, i + 1)).collect();
    let (l2, _) = apply_batch(&l, &bit_batch(&l, &path)).unwrap();
    let prog = universal_update(&g, eccentricity_max);
    let res = run_batch(&prog, &g, &l, &l2, vec![l.clone(); 8], &SimConfig::default()).unwrap();
    assert_eq!(subgraph_diameter(8, &l2.subgraph_edges()), 5);
    assert!(res.outputs.iter().all(|o| o.output == 5));
}

fn degree(view: &RadiusRView) -> usize {
    view.labels.iter().filter(|(e, l)| e.touches(view.me) && l.bit() == Some(true)).count()
}

fn labelled_count(view: &RadiusRView) -> usize {
    view.labels.values().filter(|l| l.bit() == Some(true)).count()
}

fn flood<O: Send>(
    g: &CommGraph,
    l1: &Labelling,
    l2: &Labelling,
    r: usize,
    solver: impl Fn(&RadiusRView) -> O + Sync,
) -> crate::sim::RunResult<LocalOutput<O>> {
    let prog = local1_update(r, solver);
    run_batch(&prog, g, l1, l2, RadiusRView::all(g, l1, r), &SimConfig::default()).unwrap()
}

#[test]
fn flood_empty_batch_halts_fast() {
    let g = gen::path(40).unwrap();
    let l = gen::random_labelling(&g, LabelDomain::Bits { p: 0.5 }, 1);
    let res = flood(&g, &l, &l, 1, degree);
    assert!(res.metrics.rounds <= 2);
}

#[test]
fn flipping_one_edge_changes_two_degrees() {
    let g = gen::random_gnm(12, 30, 5).unwrap();
    let l = gen::random_labelling(&g, LabelDomain::Bits { p: 0.5 }, 5);
    let x = g.edges()[7];
    let (l2, _) = apply_batch(&l, &bit_batch(&l, &[x])).unwrap();
    let before: Vec<usize> = RadiusRView::all(&g, &l, 1).iter().map(degree).collect();
    let res = flood(&g, &l, &l2, 1, degree);
    let changed: Vec<usize> = (0..12).filter(|&v| res.outputs[v].output != before[v]).collect();
    assert_eq!(changed, vec![x.u.index(), x.v.index()]);
}

#[test]
fn radius_two_count() {
    let g = gen::random_gnm(10, 20, 8).unwrap();
    let l = gen::random_labelling(&g, LabelDomain::Bits { p: 0.5 }, 8);
    let b = &gen::generate_batches(&g, &l, AlphaDist::Fixed, 3, 1, LabelDomain::Bits { p: 0.5 }, 8).unwrap()[0];
    let (l2, _) = apply_batch(&l, b).unwrap();
    let res = flood(&g, &l, &l2, 2, labelled_count);
    for v in g.nodes() {
        // centralized scan: labelled edges with an endpoint within two hops
        let d = g.bfs_distances(v);
        let count = l2
            .subgraph_edges()
            .iter()
            .filter(|e| d[e.u.index()].unwrap() <= 2 || d[e.v.index()].unwrap() <= 2)
            .count();
        assert_eq!(res.outputs[v.index()].output, count);
    }
}

#[test]
fn flood_rounds_ignore_far_tail() {
    let base = gen::random_gnm(16, 40, 3).unwrap();
    let l_base = gen::random_labelling(&base, LabelDomain::Bits { p: 0.5 }, 3);
    let changes: Vec<EdgeId> = base.edges()[..4].to_vec();
    let mut rounds = Vec::new();
    for tail in [20, 40] {
        let g = gen::with_tail(&base, tail).unwrap();
        let mut labels: BTreeMap<EdgeId, Label> = l_base.iter().collect();
        for e in g.edges() {
            labels.entry(*e).or_insert(Label::Bit(false));
        }
        let l = Labelling::new(&g, labels).unwrap();
        let (l2, _) = apply_batch(&l, &bit_batch(&l, &changes)).unwrap();
        rounds.push(flood(&g, &l, &l2, 2, labelled_count).metrics.rounds);
    }
    assert_eq!(rounds[0], rounds[1]);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn stores_track_the_labelling(n in 2usize..30, extra in 0usize..40, alpha in 1usize..10, seed in 0u64..1000) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen::random_gnm(n, m, seed).unwrap();
        let domain = LabelDomain::Bits { p: 0.4 };
        let l = gen::random_labelling(&g, domain, seed);
        let b = &gen::generate_batches(&g, &l, AlphaDist::Uniform, alpha.min(m), 1, domain, seed).unwrap()[0];
        let (l2, res) = universal_round(&g, &l, b);
        for out in &res.outputs {
            prop_assert_eq!(&out.labelling, &l2);
        }
        prop_assert!(res.metrics.rounds <= 2 * b.alpha() + 8 * g.diameter() + 16);
        for r in 1..=3 {
            let res = flood(&g, &l, &l2, r, |v: &RadiusRView| v.clone());
            for v in g.nodes() {
                prop_assert_eq!(&res.outputs[v.index()].view, &RadiusRView::from_labelling(&g, &l2, v, r));
            }
            prop_assert!(res.metrics.rounds <= 2 * r * (b.alpha() + 1));
        }
    }
}
