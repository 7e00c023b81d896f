use super::*;
use crate::graph::CommGraph;
use crate::harness::gen;
use crate::sim::{run, SimConfig};
use proptest::prelude::*;

fn bfs(g: &CommGraph) -> (BfsTree, usize) {
    let res = run(&BfsProgram, g, vec![(); g.n()], &SimConfig::default()).unwrap();
    (BfsTree::from_positions(&res.outputs), res.metrics.rounds)
}

fn broadcast(g: &CommGraph, local: Vec<Vec<u64>>) -> (Vec<BroadcastOutput<u64>>, usize) {
    // the default ceiling assumes at most m items; leave room for more
    let items: usize = local.iter().map(Vec::len).sum();
    let cfg = SimConfig { max_rounds: Some(10 * (g.n() + g.m()) + 2 * items), ..SimConfig::default() };
    let res = run(&BroadcastProgram::<u64>::default(), g, local, &cfg).unwrap();
    // rounds of the cast itself, after the tree is built
    let cast = res.metrics.rounds - res.metrics.phase_breakdown["bfs"];
    (res.outputs, cast)
}

#[test]
fn two_node_path() {
    let (t, _) = bfs(&gen::path(2).unwrap());
    assert_eq!(t.root, NodeId(0));
    assert_eq!(t.parent, vec![NodeId(0), NodeId(0)]);
    assert_eq!(t.depth, vec![0, 1]);
}

#[test]
fn four_cycle_tie_break() {
    let (t, _) = bfs(&gen::cycle(4).unwrap());
    assert_eq!(t.depth, vec![0, 1, 2, 1]);
    assert_eq!(t.parent[2], NodeId(1));
}

#[test]
fn star_with_high_center() {
    let g = CommGraph::new(6, (0..5).map(|i| (5, i))).unwrap();
    let (t, _) = bfs(&g);
    assert_eq!(t.root, NodeId(0));
    assert_eq!(t.parent[5], NodeId(0));
    for i in 1..5 {
        assert_eq!(t.parent[i], NodeId(5));
    }
}

#[test]
fn children_match_parents() {
    let g = gen::random_gnm(30, 60, 4).unwrap();
    let res = run(&BfsProgram, &g, vec![(); 30], &SimConfig::default()).unwrap();
    for p in &res.outputs {
        for c in &p.children {
            assert_eq!(res.outputs[c.index()].parent, Some(p.me));
        }
    }
}

#[test]
fn empty_broadcast() {
    let g = gen::path(10).unwrap();
    let (out, rounds) = broadcast(&g, vec![Vec::new(); 10]);
    assert!(out.iter().all(|o| o.items.is_empty()));
    assert!(rounds <= 4 * g.diameter() + 8);
}

#[test]
fn leaf_item_travels_the_path() {
    let g = gen::path(12).unwrap();
    let mut local = vec![Vec::new(); 12];
    local[11] = vec![42];
    let (out, rounds) = broadcast(&g, local);
    assert!(out.iter().all(|o| o.items == [42]));
    assert!(rounds >= g.diameter() - 1);
}

#[test]
fn eight_items_on_random_graph() {
    let g = gen::random_gnm(16, 30, 11).unwrap();
    let mut local = vec![Vec::new(); 16];
    for i in 0..8u64 {
        local[(i as usize * 5) % 16].push(100 + i);
    }
    // duplicates count once
    local[3].push(100);
    let (out, _) = broadcast(&g, local);
    let expect: Vec<u64> = (100..108).collect();
    assert!(out.iter().all(|o| o.items == expect));
}

#[test]
fn deterministic_tree() {
    let g = gen::random_gnm(40, 90, 2).unwrap();
    assert_eq!(bfs(&g), bfs(&g));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bfs_depths_are_distances(n in 2usize..40, extra in 0usize..60, seed in 0u64..500) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen::random_gnm(n, m, seed).unwrap();
        let (t, _) = bfs(&g);
        let d = g.bfs_distances(t.root);
        for v in 0..n {
            prop_assert_eq!(Some(t.depth[v]), d[v]);
            if v != t.root.index() {
                prop_assert!(g.has_edge(NodeId::from(v), t.parent[v]));
                prop_assert_eq!(t.depth[t.parent[v].index()] + 1, t.depth[v]);
            }
        }
        prop_assert!(t.height() <= g.diameter());
    }

    #[test]
    fn broadcast_is_pipelined(n in 2usize..40, extra in 0usize..60, seed in 0u64..500, items in proptest::collection::vec((0usize..40, 0u64..200), 0..60)) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let g = gen::random_gnm(n, m, seed).unwrap();
        let mut local = vec![Vec::new(); n];
        let mut all = std::collections::BTreeSet::new();
        for (v, x) in items {
            local[v % n].push(x);
            all.insert(x);
        }
        let (out, rounds) = broadcast(&g, local);
        let expect: Vec<u64> = all.into_iter().collect();
        for o in &out {
            prop_assert_eq!(&o.items, &expect);
        }
        prop_assert!(rounds <= expect.len() + 4 * g.diameter() + 8, "{} rounds, |M|={}, D={}", rounds, expect.len(), g.diameter());
    }
}
