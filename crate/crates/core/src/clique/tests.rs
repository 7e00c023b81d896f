use super::*;
use crate::graph::{apply_batch, BatchUpdate, Label};
use crate::harness::gen;
use crate::oracles::{bitmask_cliques, brute_cliques, degeneracy, is_acyclic, orientation_reference};
use orientation::iteration_count;
use proptest::prelude::*;

fn cliques_at(outputs: &[CliqueOutput], k: usize) -> Vec<BTreeSet<Vec<NodeId>>> {
    outputs.iter().map(|o| enumerate_cliques(&o.view, k).unwrap()).collect()
}

fn arcs(outputs: &[CliqueOutput]) -> Vec<(NodeId, NodeId)> {
    let mut a = Vec::new();
    for (i, o) in outputs.iter().enumerate() {
        let v = NodeId::from(i);
        for e in &o.orientation.out_edges {
            a.push((v, e.other(v)));
        }
    }
    a.sort();
    a
}

fn step(
    g: &CommGraph,
    l1: &Labelling,
    batch: &BatchUpdate,
) -> (Labelling, RunResult<CliqueOutput>) {
    let (l2, _) = apply_batch(l1, batch).unwrap();
    let res = run_clique_batch(g, l1, &l2, NeighborhoodView::all(g, l1), &SimConfig::default()).unwrap();
    (l2, res)
}

#[test]
fn k_too_small() {
    let g = gen::clique(3).unwrap();
    let l = Labelling::uniform(&g, Label::Bit(true));
    let v = NeighborhoodView::from_labelling(&g, &l, NodeId(0));
    assert_eq!(enumerate_cliques(&v, 2), Err(CliqueError::KTooSmall(2)));
    assert_eq!(enumerate_cliques(&v, 3).unwrap().len(), 1);
}

#[test]
fn empty_subgraph_has_no_cliques() {
    let g = gen::clique(5).unwrap();
    let l = Labelling::uniform(&g, Label::Bit(false));
    for v in NeighborhoodView::all(&g, &l) {
        for k in 3..6 {
            assert!(enumerate_cliques(&v, k).unwrap().is_empty());
        }
    }
}

#[test]
fn triangle_orientation() {
    let g = gen::clique(4).unwrap();
    let l1 = Labelling::uniform(&g, Label::Bit(false));
    let batch = BatchUpdate::from_changes(
        [(1, 2), (1, 3), (2, 3)].map(|(a, b)| (EdgeId::of(a, b), Label::Bit(true))),
    )
    .unwrap();
    let (_, res) = step(&g, &l1, &batch);
    let a = arcs(&res.outputs);
    let expect: Vec<_> = [(1, 2), (1, 3), (2, 3)].map(|(x, y)| (NodeId(x), NodeId(y))).to_vec();
    assert_eq!(a, expect);
    for v in 1..4 {
        assert_eq!(res.outputs[v].orientation.halt_iteration, 1);
    }
}

#[test]
fn single_edge_points_up() {
    let g = gen::path(2).unwrap();
    let l1 = Labelling::uniform(&g, Label::Bit(false));
    let batch = BatchUpdate::from_changes([(EdgeId::of(0, 1), Label::Bit(true))]).unwrap();
    let (_, res) = step(&g, &l1, &batch);
    assert_eq!(arcs(&res.outputs), vec![(NodeId(0), NodeId(1))]);
}

#[test]
fn star_leaves_orient_to_center() {
    let g = gen::star(101).unwrap();
    let l1 = Labelling::uniform(&g, Label::Bit(false));
    let batch = BatchUpdate::from_changes(g.edges().iter().map(|&e| (e, Label::Bit(true)))).unwrap();
    let (_, res) = step(&g, &l1, &batch);
    // the centre is node 0
    assert!(res.outputs[0].orientation.out_edges.is_empty());
    for v in 1..101 {
        assert_eq!(res.outputs[v].orientation.out_edges, vec![EdgeId::of(0, v)]);
        assert_eq!(res.outputs[v].orientation.halt_iteration, 1);
    }
}

#[test]
fn empty_batch_is_constant_time() {
    let g = gen::path(30).unwrap();
    let l1 = Labelling::uniform(&g, Label::Bit(true));
    let (l2, res) = step(&g, &l1, &BatchUpdate::new());
    assert!(res.metrics.rounds <= 3, "{} rounds", res.metrics.rounds);
    for (v, o) in res.outputs.iter().enumerate() {
        assert_eq!(o.view, NeighborhoodView::from_labelling(&g, &l2, NodeId::from(v)));
    }
}

#[test]
fn filling_a_four_clique() {
    let g = gen::clique(4).unwrap();
    let l1 = Labelling::uniform(&g, Label::Bit(false));
    let batch = BatchUpdate::from_changes(g.edges().iter().map(|&e| (e, Label::Bit(true)))).unwrap();
    let (_, res) = step(&g, &l1, &batch);
    let all: Vec<NodeId> = (0..4).map(NodeId).collect();
    for o in &res.outputs {
        assert_eq!(o.view.y.len(), 6);
        assert!(o.view.y.values().all(|&b| b));
        assert_eq!(enumerate_cliques(&o.view, 4).unwrap(), BTreeSet::from([all.clone()]));
    }
}

#[test]
fn removing_a_triangle_edge() {
    let g = gen::clique(6).unwrap();
    let mut labels = BTreeMap::new();
    for &e in g.edges() {
        let on = [EdgeId::of(1, 3), EdgeId::of(3, 5), EdgeId::of(1, 5), EdgeId::of(0, 1)].contains(&e);
        labels.insert(e, Label::Bit(on));
    }
    let l1 = Labelling::new(&g, labels).unwrap();
    for v in [1, 3, 5] {
        let view = NeighborhoodView::from_labelling(&g, &l1, NodeId(v));
        assert_eq!(enumerate_cliques(&view, 3).unwrap().len(), 1);
    }
    let batch = BatchUpdate::from_changes([(EdgeId::of(3, 5), Label::Bit(false))]).unwrap();
    let (_, res) = step(&g, &l1, &batch);
    for o in &res.outputs {
        assert!(enumerate_cliques(&o.view, 3).unwrap().is_empty());
    }
}

#[test]
fn random_subgraph_four_cliques() {
    let g = gen::random_gnm(12, 50, 7).unwrap();
    let l = gen::random_labelling(&g, gen::LabelDomain::Bits { p: 0.8 }, 3);
    let sub = l.subgraph_edges();
    let expect = brute_cliques(12, &sub, 4);
    for (v, view) in NeighborhoodView::all(&g, &l).iter().enumerate() {
        assert_eq!(enumerate_cliques(view, 4).unwrap(), expect[v]);
    }
}

fn check_batch(g: &CommGraph, l1: &Labelling, batch: &BatchUpdate) -> Labelling {
    let (l2, res) = step(g, l1, batch);
    let alpha = batch.alpha();
    // views match the new labelling everywhere
    for (v, o) in res.outputs.iter().enumerate() {
        assert_eq!(o.view, NeighborhoodView::from_labelling(g, &l2, NodeId::from(v)));
    }
    let changed: Vec<EdgeId> = batch.iter().map(|(e, _)| e).collect();
    let a = arcs(&res.outputs);
    assert_eq!(a.len(), changed.len());
    assert!(is_acyclic(g.n(), &a));
    let mut reference = orientation_reference(g.n(), &changed, iteration_count(g.n()));
    reference.sort();
    assert_eq!(a, reference);
    let maxout = res.outputs.iter().map(|o| o.orientation.out_edges.len()).max().unwrap_or(0);
    assert!(maxout as f64 <= 6.0 * (alpha as f64).sqrt() + 1e-9, "outdegree {maxout} for alpha {alpha}");
    assert!((degeneracy(g.n(), &changed) as f64) <= (2.0 * alpha as f64).sqrt() + 1e-9);
    let sub = l2.subgraph_edges();
    let expect = bitmask_cliques(g.n(), &sub, 3);
    for (v, o) in res.outputs.iter().enumerate() {
        assert_eq!(enumerate_cliques(&o.view, 3).unwrap(), expect[v]);
    }
    let _ = cliques_at(&res.outputs, 3);
    l2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn batches_keep_views_exact(n in 6usize..24, extra in 0usize..40, seed in 0u64..1000, alpha in 0usize..30) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen::random_gnm(n, m, seed).unwrap();
        let domain = gen::LabelDomain::Bits { p: 0.5 };
        let mut l = gen::random_labelling(&g, domain, seed + 1);
        let batches = gen::generate_batches(&g, &l, gen::AlphaDist::Fixed, alpha.min(m), 3, domain, seed + 2).unwrap();
        for b in &batches {
            l = check_batch(&g, &l, b);
        }
    }
}
