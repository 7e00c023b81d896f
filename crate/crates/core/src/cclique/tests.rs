use super::matmul::{assemble, entries_of_batch};
use super::*;
use crate::graph::{apply_batch, EdgeId, Label};
use crate::harness::gen::{self, AlphaDist, LabelDomain};
use crate::oracles::{matmul_reference, triangle_reference};
use proptest::prelude::*;
use rand::Rng;

fn cfg() -> SimConfig {
    SimConfig::default()
}

#[test]
fn route_needs_clique() {
    let g = gen::path(4).unwrap();
    assert_eq!(cc_route::<u64>(&g, vec![Vec::new(); 4], &cfg()).unwrap_err(), CcError::NotAClique);
}

#[test]
fn one_message_each() {
    let n = 10;
    let g = gen::clique(n).unwrap();
    let demands = (0..n).map(|v| vec![(NodeId::from((v + 3) % n), v as u64)]).collect();
    let res = cc_route(&g, demands, &cfg()).unwrap();
    for v in 0..n {
        let src = (v + n - 3) % n;
        assert_eq!(res.outputs[v], vec![(NodeId::from(src), src as u64)]);
    }
    // count round plus one delivery round
    assert!(res.metrics.rounds <= 3, "rounds {}", res.metrics.rounds);
}

#[test]
fn fan_out_is_constant() {
    let n = 16;
    let g = gen::clique(n).unwrap();
    let mut demands = vec![Vec::new(); n];
    demands[0] = (0..n).map(|x| (NodeId::from(x), x as u64)).collect();
    let res = cc_route(&g, demands, &cfg()).unwrap();
    for x in 0..n {
        assert_eq!(res.outputs[x], vec![(NodeId(0), x as u64)]);
    }
    assert!(res.metrics.rounds <= 4);
}

#[test]
fn many_to_one_target_is_balanced() {
    let n = 16;
    let g = gen::clique(n).unwrap();
    let mut demands = vec![Vec::new(); n];
    demands[1] = (0..3 * n as u64).map(|i| (NodeId(5), i)).collect();
    let res = cc_route(&g, demands, &cfg()).unwrap();
    assert_eq!(res.outputs[5].len(), 3 * n);
    assert!(res.metrics.rounds <= 2 * (3 + 1) + 2, "rounds {}", res.metrics.rounds);
}

#[test]
fn replicate_four_n_items() {
    let n = 16;
    let g = gen::clique(n).unwrap();
    let mut items = vec![Vec::new(); n];
    items[3] = (0..4 * n as u64).collect();
    let res = cc_allcast(&g, items, &cfg()).unwrap();
    for out in &res.outputs {
        assert_eq!(out, &(0..4 * n as u64).collect::<Vec<_>>());
    }
    assert!(res.metrics.rounds <= 2 * 5, "rounds {}", res.metrics.rounds);
}

fn edge_count(_: &CommGraph, l: &Labelling, _: NodeId) -> usize {
    l.subgraph_edges().len()
}

#[test]
fn universal_on_clique() {
    let n = 32;
    let g = gen::clique(n).unwrap();
    let domain = LabelDomain::Bits { p: 0.3 };
    let l = gen::random_labelling(&g, domain, 1);
    let same = run_cc_universal(&g, &l, &l, edge_count, &cfg()).unwrap();
    assert!(same.outputs.iter().all(|o| o.output == l.subgraph_edges().len()));
    for alpha in [5, n, 3 * n] {
        let b = &gen::generate_batches(&g, &l, AlphaDist::Fixed, alpha, 1, domain, alpha as u64).unwrap()[0];
        let (l2, _) = apply_batch(&l, b).unwrap();
        let res = run_cc_universal(&g, &l, &l2, edge_count, &cfg()).unwrap();
        assert!(res.outputs.iter().all(|o| o.labelling == l2 && o.output == l2.subgraph_edges().len()));
        // 2 + ⌈k_max/n⌉ + ⌈α/n⌉ rounds, k_max ≤ α
        assert!(res.metrics.rounds <= 3 + 2 * alpha.div_ceil(n), "alpha {alpha}: {} rounds", res.metrics.rounds);
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

#[test]
fn two_by_two_example() {
    let g = gen::clique(2).unwrap();
    let s = identity(2);
    let t = vec![vec![2, 3], vec![4, 5]];
    let aux = MatrixRowAux::from_matrices(&s, &t);
    let res = run_matmul_batch(&g, &DynMatmul::default(), aux, &[(0, 1, 1)], &[], Some(0), &cfg()).unwrap();
    let aux: Vec<MatrixRowAux> = res.outputs.into_iter().map(|o| o.aux).collect();
    let (s2, t2, p2) = assemble(&aux);
    assert_eq!(p2, vec![vec![6, 8], vec![4, 5]]);
    assert_eq!(p2, matmul_reference(&s2, &t2));
}

#[test]
fn zero_delta_sends_no_corrections() {
    let n = 8;
    let g = gen::clique(n).unwrap();
    let s = identity(n);
    let aux = MatrixRowAux::from_matrices(&s, &s);
    let res = run_matmul_batch(&g, &DynMatmul::default(), aux.clone(), &[], &[], Some(1), &cfg()).unwrap();
    assert!(res.outputs.iter().zip(&aux).all(|(o, a)| o.aux == *a));
    let res = run_matmul_batch(&g, &DynMatmul::default(), aux, &[], &[], None, &cfg().with_transcript()).unwrap();
    assert!(res.transcript.iter().all(|l| l.tag != "route-deliver" && l.tag != "route-relay"));
}

#[test]
fn corrupted_product_is_rejected() {
    let n = 4;
    let g = gen::clique(n).unwrap();
    let mut aux = MatrixRowAux::from_matrices(&identity(n), &identity(n));
    for a in &mut aux {
        a.p_row[0] += 1;
    }
    let err = run_matmul_batch(&g, &DynMatmul::default(), aux, &[], &[], Some(3), &cfg()).unwrap_err();
    assert!(matches!(err, CcError::InconsistentAux(_)));
}

fn random_matrix(n: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect()
}

fn random_changes(n: usize, k: usize, rng: &mut impl Rng) -> Vec<(usize, usize, i64)> {
    let mut m = std::collections::BTreeMap::new();
    while m.len() < k {
        m.insert((rng.gen_range(0..n), rng.gen_range(0..n)), rng.gen_range(-3..4));
    }
    m.into_iter().map(|((i, j), x)| (i, j, x)).collect()
}

#[test]
fn random_eight_by_eight() {
    let mut rng = gen::rng(8);
    let n = 8;
    let g = gen::clique(n).unwrap();
    let (s, t) = (random_matrix(n, &mut rng), random_matrix(n, &mut rng));
    let aux = MatrixRowAux::from_matrices(&s, &t);
    let (ds, dt) = (random_changes(n, 5, &mut rng), random_changes(n, 5, &mut rng));
    let res = run_matmul_batch(&g, &DynMatmul::default(), aux, &ds, &dt, Some(2), &cfg()).unwrap();
    let aux: Vec<MatrixRowAux> = res.outputs.into_iter().map(|o| o.aux).collect();
    let (s2, t2, p2) = assemble(&aux);
    let (mut rs, mut rt) = (s.clone(), t.clone());
    for &(i, j, x) in &ds {
        rs[i][j] = x;
    }
    for &(i, j, x) in &dt {
        rt[i][j] = x;
    }
    assert_eq!((s2.clone(), t2.clone()), (rs, rt));
    assert_eq!(p2, matmul_reference(&s2, &t2));
}

fn adjacency(g: &CommGraph, l: &Labelling) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0; g.n()]; g.n()];
    for e in l.subgraph_edges() {
        a[e.u.index()][e.v.index()] = 1;
        a[e.v.index()][e.u.index()] = 1;
    }
    a
}

#[test]
fn triangle_examples() {
    let n = 8;
    let g = gen::clique(n).unwrap();
    let empty = vec![vec![0; n]; n];
    let aux = MatrixRowAux::from_matrices(&empty, &empty);
    let res = run_triangle_batch(&g, aux.clone(), &[], &cfg()).unwrap();
    assert!(res.outputs.iter().all(|o| o.triangles == Some(0)));
    let tri = [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1), (0, 2, 1), (2, 0, 1)];
    let res = run_triangle_batch(&g, aux.clone(), &tri, &cfg()).unwrap();
    assert!(res.outputs.iter().all(|o| o.triangles == Some(1)));
    assert_eq!(run_triangle_batch(&g, aux, &tri[..3], &cfg()).unwrap_err(), CcError::AsymmetricBatch(1, 2));
}

#[test]
fn triangles_over_fifty_batches() {
    let n = 16;
    let g = gen::clique(n).unwrap();
    let domain = LabelDomain::Bits { p: 0.3 };
    let mut l = gen::random_labelling(&g, domain, 16);
    let a = adjacency(&g, &l);
    let mut aux = MatrixRowAux::from_matrices(&a, &a);
    let batches = gen::generate_batches(&g, &l, AlphaDist::Uniform, 12, 50, domain, 16).unwrap();
    for b in &batches {
        let res = run_triangle_batch(&g, aux, &entries_of_batch(b), &cfg()).unwrap();
        l = apply_batch(&l, b).unwrap().0;
        let a = adjacency(&g, &l);
        let expected = triangle_reference(&a) as i64;
        assert!(res.outputs.iter().all(|o| o.triangles == Some(expected)));
        aux = res.outputs.into_iter().map(|o| o.aux).collect();
        let (s, t, p) = assemble(&aux);
        assert_eq!(s, a);
        assert_eq!(t, a);
        // A symmetric implies A·A symmetric
        assert!((0..n).all(|i| (0..n).all(|j| p[i][j] == p[j][i])));
        assert_eq!(p, matmul_reference(&a, &a));
    }
}

#[test]
fn edge_labels_give_symmetric_entries() {
    let g = gen::clique(4).unwrap();
    let b = crate::graph::BatchUpdate::from_changes([(EdgeId::of(0, 2), Label::Bit(true))]).unwrap();
    let entries = entries_of_batch(&b);
    assert_eq!(triangle_batch(&entries).unwrap(), vec![(0, 2, 1), (2, 0, 1)]);
    assert!(g.is_complete());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn product_stays_exact(n in 2usize..12, ks in 0usize..30, kt in 0usize..30, seed in 0u64..1000) {
        let mut rng = gen::rng(seed);
        let g = gen::clique(n).unwrap();
        let (s, t) = (random_matrix(n, &mut rng), random_matrix(n, &mut rng));
        let aux = MatrixRowAux::from_matrices(&s, &t);
        let ds = random_changes(n, ks.min(n * n), &mut rng);
        let dt = random_changes(n, kt.min(n * n), &mut rng);
        let res = run_matmul_batch(&g, &DynMatmul::default(), aux, &ds, &dt, Some(seed), &cfg()).unwrap();
        let alpha = ds.len() + dt.len();
        let aux: Vec<MatrixRowAux> = res.outputs.into_iter().map(|o| o.aux).collect();
        let (s2, t2, p2) = assemble(&aux);
        prop_assert_eq!(p2, matmul_reference(&s2, &t2));
        prop_assert!(res.metrics.rounds <= 4 * (alpha.div_ceil(n) + 1) + 4, "rounds {}", res.metrics.rounds);
    }

    #[test]
    fn routing_delivers_everything(n in 2usize..14, per in 0usize..40, seed in 0u64..1000) {
        let mut rng = gen::rng(seed);
        let g = gen::clique(n).unwrap();
        let demands: Vec<Vec<(NodeId, u64)>> = (0..n)
            .map(|v| (0..rng.gen_range(0..=per)).map(|i| (NodeId::from(rng.gen_range(0..n)), (v * 1000 + i) as u64)).collect())
            .collect();
        let mut expected: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n];
        for (v, d) in demands.iter().enumerate() {
            for &(dst, x) in d {
                expected[dst.index()].push((NodeId::from(v), x));
            }
        }
        for e in &mut expected {
            e.sort();
        }
        let load = demands.iter().map(Vec::len).chain(expected.iter().map(Vec::len)).max().unwrap_or(0);
        let res = cc_route(&g, demands, &cfg()).unwrap();
        prop_assert_eq!(res.outputs, expected);
        prop_assert!(res.metrics.rounds <= 4 * (load.div_ceil(n) + 1) + 2, "rounds {} load {}", res.metrics.rounds, load);
    }
}
