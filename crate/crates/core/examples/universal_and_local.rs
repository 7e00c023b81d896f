//! The two generic updates: broadcast every change so each node can solve
//! any problem on the full labelling, or flood changes only within radius r.
//! Here the global problem is all-pairs distances in the labelled subgraph
//! and the local one is each node's degree in it.
//!
//!     cargo run --release --example universal_and_local

use batch_congest::graph::{apply_batch, CommGraph, Labelling, NodeId};
use batch_congest::harness::gen::{self, AlphaDist, LabelDomain};
use batch_congest::oracles::apsp;
use batch_congest::sim::{run_batch, SimConfig};
use batch_congest::universal::{local1_update, universal_update, RadiusRView};

fn distances_from(g: &CommGraph, l: &Labelling, v: NodeId) -> Vec<Option<usize>> {
    apsp(g.n(), &l.subgraph_edges()).swap_remove(v.index())
}

fn main() {
    let g = gen::random_gnm(40, 100, 3).unwrap();
    let dom = LabelDomain::Bits { p: 0.4 };
    let mut cur = gen::random_labelling(&g, dom, 3);
    let cfg = SimConfig::default();
    let uni = universal_update(&g, distances_from);
    let loc = local1_update(2, |view: &RadiusRView| view.bit_size(40));
    let mut stored = vec![cur.clone(); g.n()];
    let mut views = RadiusRView::all(&g, &cur, 2);
    println!("G(40,100), D = {}", g.diameter());
    println!("alpha  universal_rounds  ok   local_r2_rounds  max_view_bits");
    for alpha in [1, 4, 16, 64] {
        let b = gen::generate_batches(&g, &cur, AlphaDist::Fixed, alpha, 1, dom, alpha as u64).unwrap().remove(0);
        let next = apply_batch(&cur, &b).unwrap().0;
        let u = run_batch(&uni, &g, &cur, &next, stored, &cfg).unwrap();
        let truth = apsp(g.n(), &next.subgraph_edges());
        let ok = u.outputs.iter().enumerate().all(|(v, o)| o.output == truth[v]);
        let r = run_batch(&loc, &g, &cur, &next, views, &cfg).unwrap();
        let max_bits = r.outputs.iter().map(|o| o.output).max().unwrap_or(0);
        println!("{alpha:>5}  {:>16}  {ok:<4} {:>15}  {max_bits:>13}", u.metrics.rounds, r.metrics.rounds);
        stored = u.outputs.into_iter().map(|o| o.labelling).collect();
        views = r.outputs.into_iter().map(|o| o.view).collect();
        cur = next;
    }
}
