//! Congested clique: two-hop routing of an unbalanced demand, then dynamic
//! triangle counting over a trace of edge flips.
//!
//!     cargo run --release --example congested_clique

use batch_congest::cclique::matmul::{entries_of_batch, run_triangle_batch, MatrixRowAux};
use batch_congest::cclique::cc_route;
use batch_congest::graph::{apply_batch, NodeId};
use batch_congest::harness::gen::{self, AlphaDist, LabelDomain};
use batch_congest::oracles::triangle_reference;
use batch_congest::sim::SimConfig;

fn main() {
    let n = 24;
    let g = gen::clique(n).unwrap();
    let cfg = SimConfig::default();

    // every node sends n messages, all to node 0 and node 1
    let demands: Vec<Vec<(NodeId, u64)>> =
        (0..n).map(|v| (0..n).map(|i| (NodeId((i % 2) as u32), (v * n + i) as u64)).collect()).collect();
    let routed = cc_route(&g, demands, &cfg).unwrap();
    let got: Vec<usize> = routed.outputs.iter().map(|o| o.len()).take(3).collect();
    println!("routing n^2 = {} items to two nodes: {} rounds, received {:?}...", n * n, routed.metrics.rounds, got);

    let dom = LabelDomain::Bits { p: 0.3 };
    let mut cur = gen::random_labelling(&g, dom, 2);
    let adj = |l: &batch_congest::graph::Labelling| {
        let mut a = vec![vec![0i64; n]; n];
        for e in l.subgraph_edges() {
            a[e.u.index()][e.v.index()] = 1;
            a[e.v.index()][e.u.index()] = 1;
        }
        a
    };
    let a = adj(&cur);
    let mut aux = MatrixRowAux::from_matrices(&a, &a);
    println!("\ntriangles in G(24, 0.3): {}", triangle_reference(&a));
    println!("alpha  rounds  total  reference");
    for alpha in [1, 8, 24, 48, 96] {
        let b = gen::generate_batches(&g, &cur, AlphaDist::Fixed, alpha, 1, dom, alpha as u64).unwrap().remove(0);
        let next = apply_batch(&cur, &b).unwrap().0;
        let res = run_triangle_batch(&g, aux, &entries_of_batch(&b), &cfg).unwrap();
        let total = res.outputs[0].triangles.unwrap();
        println!("{alpha:>5}  {:>6}  {total:>5}  {:>9}", res.metrics.rounds, triangle_reference(&adj(&next)));
        aux = res.outputs.into_iter().map(|o| o.aux).collect();
        cur = next;
    }
}
