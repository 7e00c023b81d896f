use super::aux::{aux_from_restriction, decode, encode};
use super::*;
use crate::harness::gen;
use proptest::prelude::*;

fn n(x: u32) -> NodeId {
    NodeId(x)
}

fn e(a: usize, b: usize) -> EdgeId {
    EdgeId::of(a, b)
}

/// Three-node path 1-2-3 with tour (1,2)=0, (2,3)=1, (3,2)=2, (2,1)=3.
fn path3() -> EulerTourForest {
    let f = EulerTourForest::from_tree(4, [e(1, 2), e(2, 3)]).unwrap();
    assert_eq!(f.label(n(1), n(2)), Some(0));
    assert_eq!(f.label(n(2), n(3)), Some(1));
    assert_eq!(f.label(n(3), n(2)), Some(2));
    assert_eq!(f.label(n(2), n(1)), Some(3));
    f
}

#[test]
fn singleton_root_is_noop() {
    let mut f = EulerTourForest::singletons(3);
    let before = f.clone();
    f.root(n(1));
    assert_eq!(f, before);
    assert_eq!(f.info(n(1)).root, n(1));
}

#[test]
fn reroot_two_nodes() {
    let mut f = EulerTourForest::from_tree(3, [e(1, 2)]).unwrap();
    f.root(n(2));
    assert_eq!(f.label(n(2), n(1)), Some(0));
    assert_eq!(f.label(n(1), n(2)), Some(1));
    assert_eq!(f.info(n(2)), NodeInfo { root: n(2), size: 2, a: 0 });
    assert_eq!(f.info(n(1)).a, 1);
    f.validate().unwrap();
}

#[test]
fn reroot_path_middle() {
    let mut f = path3();
    f.root(n(2));
    assert_eq!(f.label(n(1), n(2)), Some(3));
    assert_eq!(f.label(n(2), n(3)), Some(0));
    assert_eq!(f.label(n(3), n(2)), Some(1));
    assert_eq!(f.label(n(2), n(1)), Some(2));
    f.validate().unwrap();
}

#[test]
fn join_singletons() {
    let mut f = EulerTourForest::singletons(3);
    f.join(e(1, 2)).unwrap();
    assert_eq!(f.label(n(1), n(2)), Some(0));
    assert_eq!(f.label(n(2), n(1)), Some(1));
    assert_eq!(f.info(n(1)), NodeInfo { root: n(1), size: 2, a: 0 });
    assert_eq!(f.info(n(2)), NodeInfo { root: n(1), size: 2, a: 1 });
    f.validate().unwrap();
}

#[test]
fn join_onto_existing_tree() {
    let mut f = EulerTourForest::from_tree(4, [e(1, 2)]).unwrap();
    f.join(e(2, 3)).unwrap();
    f.validate().unwrap();
    assert_eq!(f.info(n(3)).root, n(2));
    assert_eq!(f.info(n(1)).size, 4);
    assert_eq!(f.join(e(1, 3)), Err(EttError::SameTree(e(1, 3))));
}

#[test]
fn cut_only_edge() {
    let mut f = EulerTourForest::from_tree(2, [e(0, 1)]).unwrap();
    f.cut(e(0, 1)).unwrap();
    assert_eq!(f, EulerTourForest::singletons(2));
}

#[test]
fn cut_path_end() {
    let mut f = path3();
    f.cut(e(2, 3)).unwrap();
    f.validate().unwrap();
    assert_eq!(f.label(n(2), n(1)), Some(0));
    assert_eq!(f.label(n(1), n(2)), Some(1));
    assert_eq!(f.info(n(1)).root, n(2));
    assert_eq!(f.info(n(3)), NodeInfo::singleton(n(3)));
    assert_eq!(f.cut(e(2, 3)), Err(EttError::NotTreeEdge(e(2, 3))));
    assert_eq!(f.cut(e(1, 3)), Err(EttError::NotTreeEdge(e(1, 3))));
}

#[test]
fn window_ops_match_examples() {
    let f = path3();
    let mut w = f.restrict([e(1, 2), e(2, 3)]);
    w.cut(e(2, 3)).unwrap();
    assert_eq!(w.label(n(2), n(1)).unwrap(), Some(0));
    assert_eq!(w.label(n(3), n(2)).unwrap(), None);
    assert_eq!(w.cut(e(2, 3)), Err(EttError::NotTreeEdge(e(2, 3))));
    assert!(matches!(w.cut(e(0, 1)), Err(EttError::InconsistentWindow(_))));
    let mut j = EulerTourForest::singletons(3).restrict([e(1, 2)]);
    j.join(e(1, 2)).unwrap();
    assert_eq!(j.label(n(1), n(2)).unwrap(), Some(0));
    assert_eq!(j.label(n(2), n(1)).unwrap(), Some(1));
    assert_eq!(j.join(e(1, 2)), Err(EttError::SameTree(e(1, 2))));
}

#[test]
fn untouched_tree_keeps_window() {
    let f = EulerTourForest::from_tree(6, [e(0, 1), e(1, 2), e(3, 4), e(4, 5)]).unwrap();
    let mut w = f.restrict([e(0, 1), e(3, 4)]);
    w.cut(e(0, 1)).unwrap();
    assert_eq!(w.restrict([e(3, 4)]).unwrap(), f.restrict([e(3, 4)]));
}

#[test]
fn two_node_exchange() {
    let f = EulerTourForest::from_tree(2, [e(0, 1)]).unwrap();
    let aux = encode(&f).unwrap();
    for v in 0..2u32 {
        let u = 1 - v;
        let w = restriction_from_aux(2, n(v), &aux[v as usize], &[(n(u), aux[u as usize])]).unwrap();
        assert_eq!(w, f.restrict([e(0, 1)]));
    }
}

#[test]
fn star_center_learns_all_labels() {
    let g = gen::star(6).unwrap();
    let f = EulerTourForest::from_tree(6, g.edges().iter().copied()).unwrap();
    let aux = encode(&f).unwrap();
    let nbrs: Vec<_> = (1..6).map(|v| (n(v), aux[v as usize])).collect();
    let w = restriction_from_aux(6, n(0), &aux[0], &nbrs).unwrap();
    assert_eq!(w, f.restrict(g.edges().iter().copied()));
    assert_eq!(w.edges().filter(|(_, (a, b))| a.is_some() && b.is_some()).count() * 2, 10);
}

#[test]
fn aux_fits_five_words() {
    for n in [4usize, 50, 100, 200, 1 << 20] {
        assert!(EttAux::bit_size(n) <= 5 * u64::from(crate::graph::id_bits(n)));
    }
}

/// Random spanning tree of `n` nodes from a seed.
fn random_tree(n: usize, seed: u64) -> Vec<EdgeId> {
    use rand::Rng;
    let mut rng = gen::rng(seed);
    (1..n).map(|v| e(rng.gen_range(0..v), v)).collect()
}

#[derive(Debug, Clone)]
enum Op {
    Root(usize),
    Join(usize, usize),
    Cut(usize),
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0usize..64).prop_map(Op::Root),
        (0usize..64, 0usize..64).prop_map(|(a, b)| Op::Join(a, b)),
        (0usize..64).prop_map(Op::Cut),
    ]
}

/// Applies `op` globally and, for every probe edge, through the two-edge
/// window; the window result must equal the global result restricted.
fn differential(f: &mut EulerTourForest, op: &Op, probes: &[EdgeId]) -> Result<(), TestCaseError> {
    let n = f.n();
    let before = f.clone();
    let target: Option<(EdgeId, bool)> = match *op {
        Op::Root(u) => {
            let u = NodeId::from(u % n);
            f.root(u);
            for &p in probes {
                let mut w = before.restrict([p]);
                w.insert_node(u, before.info(u)).unwrap();
                w.root(u).unwrap();
                prop_assert_eq!(w.restrict([p]).unwrap(), f.restrict([p]));
            }
            None
        }
        Op::Join(a, b) => {
            let (a, b) = (a % n, b % n);
            if a == b {
                return Ok(());
            }
            let edge = e(a, b);
            let same = before.component(edge.u).contains(&edge.v);
            let res = f.join(edge);
            prop_assert_eq!(res.is_err(), same);
            Some((edge, same))
        }
        Op::Cut(i) => {
            let tree: Vec<EdgeId> = before.tree_edges().into_iter().collect();
            if tree.is_empty() {
                return Ok(());
            }
            let edge = tree[i % tree.len()];
            f.cut(edge).unwrap();
            Some((edge, false))
        }
    };
    f.validate().map_err(|e| TestCaseError::fail(e.to_string()))?;
    if let Some((edge, failed)) = target {
        for &p in probes {
            let mut w = before.restrict([edge, p]);
            let res = if matches!(op, Op::Join(..)) { w.join(edge) } else { w.cut(edge) };
            prop_assert_eq!(res.is_err(), failed);
            if !failed {
                prop_assert_eq!(w.restrict([p]).unwrap(), f.restrict([p]));
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_op_sequences(n in 2usize..64, cut_first in 0usize..8, seed in 0u64..10_000, ops in proptest::collection::vec(op_strategy(), 1..30), probes in proptest::collection::vec((0usize..64, 0usize..64), 1..8)) {
        let mut f = EulerTourForest::from_tree(n, random_tree(n, seed)).unwrap();
        f.validate().unwrap();
        for i in 0..cut_first.min(n - 1) {
            let tree: Vec<EdgeId> = f.tree_edges().into_iter().collect();
            f.cut(tree[(i * 7) % tree.len()]).unwrap();
        }
        let probes: Vec<EdgeId> = probes.iter().filter(|(a, b)| a % n != b % n).map(|(a, b)| e(a % n, b % n)).collect();
        for op in &ops {
            differential(&mut f, op, &probes)?;
        }
    }

    #[test]
    fn join_then_cut_restores_partition(n in 2usize..40, seed in 0u64..1000, a in 0usize..40, b in 0usize..40) {
        let tree = random_tree(n, seed);
        let mut f = EulerTourForest::from_tree(n, tree.iter().copied().skip(1)).unwrap();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b && !f.component(NodeId::from(a)).contains(&NodeId::from(b)));
        let before = f.partition();
        f.join(e(a, b)).unwrap();
        f.cut(e(a, b)).unwrap();
        f.validate().unwrap();
        prop_assert_eq!(f.partition(), before);
    }

    #[test]
    fn aux_round_trip(n in 2usize..80, seed in 0u64..10_000, r in 0usize..80) {
        let mut f = EulerTourForest::from_tree(n, random_tree(n, seed)).unwrap();
        f.root(NodeId::from(r % n));
        let aux = encode(&f).unwrap();
        let f = f.normalized();
        prop_assert_eq!(&decode(&aux).unwrap(), &f);
        // per-node windows rebuilt from neighbours' aux match the forest
        let g = crate::graph::CommGraph::new(n, f.tree_edges().iter().map(|e| (e.u.index(), e.v.index()))).unwrap();
        for v in g.nodes() {
            let nbrs: Vec<_> = g.neighbors(v).iter().map(|&u| (u, aux[u.index()])).collect();
            let w = restriction_from_aux(n, v, &aux[v.index()], &nbrs).unwrap();
            prop_assert_eq!(&w, &f.restrict(g.incident_edges(v)));
            prop_assert_eq!(aux_from_restriction(v, &w).unwrap(), aux[v.index()]);
        }
    }
}
