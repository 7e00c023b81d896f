//! Keeps a minimum spanning tree across weight batches. Starts with a small
//! hand-checked cycle, then runs a random trace on a torus and compares every
//! tree with Kruskal.
//!
//!     cargo run --release --example mst_maintenance

use batch_congest::graph::{apply_batch, BatchUpdate, CommGraph, EdgeId, Label, Labelling};
use batch_congest::harness::gen::{self, AlphaDist, LabelDomain};
use batch_congest::mst::{bootstrap, run_mst_batch};
use batch_congest::oracles::kruskal_mst;
use batch_congest::sim::SimConfig;

fn show(tree: &std::collections::BTreeSet<EdgeId>) -> String {
    tree.iter().map(|e| format!("{}-{}", e.u, e.v)).collect::<Vec<_>>().join(" ")
}

fn four_cycle() {
    let g = CommGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let l = Labelling::new(&g, [(EdgeId::of(0, 1), 1), (EdgeId::of(1, 2), 2), (EdgeId::of(2, 3), 3), (EdgeId::of(0, 3), 4)]
        .into_iter()
        .map(|(e, w)| (e, Label::w(w)))
        .collect())
    .unwrap();
    let cfg = SimConfig::default();
    let mut aux = bootstrap(&g, &l).unwrap();
    let mut cur = l;
    println!("four-cycle, initial tree: {}", show(&kruskal_mst(&g, &cur).unwrap()));
    for (e, w) in [(EdgeId::of(1, 2), 10), (EdgeId::of(1, 2), 2)] {
        let b = BatchUpdate::from_changes([(e, Label::w(w))]).unwrap();
        let next = apply_batch(&cur, &b).unwrap().0;
        let out = run_mst_batch(&g, &cur, &next, aux, &cfg).unwrap();
        println!("  w({}-{}) := {w:<3} tree {}  rounds {}", e.u, e.v, show(&out.tree().unwrap()), out.metrics.rounds);
        aux = out.aux;
        cur = next;
    }
}

fn torus_trace() {
    let g = gen::torus(8, 8).unwrap();
    let dom = LabelDomain::weights_for(g.n(), 2);
    let mut cur = gen::random_labelling(&g, dom, 5);
    let mut aux = bootstrap(&g, &cur).unwrap();
    let cfg = SimConfig::default();
    println!("\n8x8 torus (D = {}), 5 batches per alpha", g.diameter());
    println!("alpha  mean_rounds  max_aux_bits  all_match");
    for alpha in [1, 2, 4, 8, 16, 32] {
        let batches = gen::generate_batches(&g, &cur, AlphaDist::Fixed, alpha, 5, dom, alpha as u64).unwrap();
        let (mut rounds, mut bits, mut ok) = (0, 0, true);
        for b in &batches {
            let next = apply_batch(&cur, b).unwrap().0;
            let out = run_mst_batch(&g, &cur, &next, aux, &cfg).unwrap();
            ok &= out.tree().unwrap() == kruskal_mst(&g, &next).unwrap();
            rounds += out.metrics.rounds;
            bits = bits.max(out.metrics.max_aux_bits);
            aux = out.aux;
            cur = next;
        }
        println!("{alpha:>5}  {:>11.1}  {bits:>12}  {ok:>9}", rounds as f64 / batches.len() as f64);
    }
}

fn main() {
    four_cycle();
    torus_trace();
}
