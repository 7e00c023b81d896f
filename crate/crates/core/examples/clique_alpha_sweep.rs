//! Clique enumeration under dense batches: rounds against α, and the same
//! batches on the graph with a long path attached.
//!
//!     cargo run --release --example clique_alpha_sweep

use batch_congest::clique::{run_clique_batch, NeighborhoodView};
use batch_congest::graph::{apply_batch, Labelling};
use batch_congest::harness::corpus::dense_bit_batch;
use batch_congest::harness::fit_power;
use batch_congest::harness::gen::{self, LabelDomain};
use batch_congest::sim::SimConfig;

fn rounds(g: &batch_congest::graph::CommGraph, l: &Labelling, alpha: usize, seed: u64) -> (usize, usize, usize) {
    let b = dense_bit_batch(g, l, alpha, seed).unwrap();
    let l2 = apply_batch(l, &b).unwrap().0;
    let res = run_clique_batch(g, l, &l2, NeighborhoodView::all(g, l), &SimConfig::default()).unwrap();
    let max_out = res.outputs.iter().map(|o| o.orientation.out_edges.len()).max().unwrap_or(0);
    (res.metrics.rounds, res.metrics.phase_breakdown["orientation"], max_out)
}

fn main() {
    let n = 48;
    let base = gen::clique(n).unwrap();
    let tailed = gen::with_tail(&base, 40).unwrap();
    let l = gen::random_labelling(&base, LabelDomain::Bits { p: 0.3 }, 1);
    let lt = gen::random_labelling(&tailed, LabelDomain::Bits { p: 0.3 }, 1);
    // same labels on the shared edges
    let lt = Labelling::new(&tailed, lt.iter().map(|(e, x)| (e, l.get(e).unwrap_or(x))).collect()).unwrap();
    println!("alpha  rounds  orientation  max_outdeg  rounds_with_tail (D {} -> {})", base.diameter(), tailed.diameter());
    let mut pts = Vec::new();
    for alpha in [4, 16, 64, 256, 1024] {
        let (r, o, d) = rounds(&base, &l, alpha, alpha as u64);
        let (rt, _, _) = rounds(&tailed, &lt, alpha, alpha as u64);
        println!("{alpha:>5}  {r:>6}  {o:>11}  {d:>10}  {rt:>16}");
        pts.push((alpha as f64, r as f64));
    }
    println!("fitted exponent of rounds vs alpha: {:.3}", fit_power(&pts).unwrap());
}
