//! Extreme bases of the two matroids behind MST repair, computed by the
//! distributed filtered convergecast and by sequential greedy.
//!
//! An increase of tree edges asks for a minimum basis of the contraction
//! matroid over all edges. A decrease of non-tree edges asks for a maximum
//! basis of the dual matroid over the tree plus the decreased edges.
//!
//!     cargo run --example matroid_bases

use std::cmp::Reverse;

use batch_congest::ett::EulerTourForest;
use batch_congest::graph::{CommGraph, EdgeId, Weight};
use batch_congest::matroid::{decorate_all, greedy_basis, owner, Contraction, Decoration, Dual, Element, ExtremeBasis, Matroid};
use batch_congest::oracles::kruskal_mst;
use batch_congest::primitives::Item;
use batch_congest::sim::{run, SimConfig};

fn distributed<T: Item + batch_congest::matroid::Decorated + Clone + Ord>(g: &CommGraph, m: &impl Matroid, items: &[T]) -> (Vec<T>, usize) {
    let mut local = vec![Vec::new(); g.n()];
    for x in items {
        local[owner(x.element().edge()).index()].push(x.clone());
    }
    let res = run(&ExtremeBasis::new(m), g, local, &SimConfig::default()).unwrap();
    let rounds = res.metrics.rounds;
    let mut outs = res.outputs.into_iter().map(|r| r.unwrap());
    let first = outs.next().unwrap();
    assert!(outs.all(|o| o == first), "every node ends with the same basis");
    (first, rounds)
}

fn names(es: impl IntoIterator<Item = EdgeId>) -> String {
    es.into_iter().map(|e| format!("{}-{}", e.u, e.v)).collect::<Vec<_>>().join(" ")
}

fn main() {
    let g = batch_congest::harness::gen::grid(3, 4).unwrap();
    let weights: Vec<(EdgeId, Weight)> =
        g.edges().iter().enumerate().map(|(i, &e)| (e, Weight::Finite(((i * 7) % 11) as i64 + 1))).collect();
    let l = batch_congest::graph::Labelling::new(
        &g,
        weights.iter().map(|&(e, w)| (e, batch_congest::graph::Label::Weight(w))).collect(),
    )
    .unwrap();
    let tree = kruskal_mst(&g, &l).unwrap();
    let forest = EulerTourForest::from_tree(g.n(), tree.iter().copied()).unwrap();
    let decos = decorate_all(&forest, weights.iter().map(|&(e, w)| (e, w, w)));
    let elems: Vec<Element> = decos.iter().zip(&weights).map(|(d, &(_, w))| Element::new(w, *d)).collect();
    println!("3x4 grid, tree: {}", names(tree.iter().copied()));

    let raised: Vec<Decoration> = decos.iter().filter(|d| d.is_tree_edge()).step_by(3).copied().collect();
    let cm = Contraction::new(&raised).unwrap();
    let (basis, rounds) = distributed(&g, &cm, &elems);
    println!("\nraised tree edges {}", names(raised.iter().map(|d| d.edge)));
    println!("  contraction rank {}, min basis {} ({rounds} rounds)", cm.rank(), names(basis.iter().map(|x| x.edge())));
    println!("  equals greedy: {}", basis == greedy_basis(&cm, &elems));

    let lowered: Vec<Decoration> = decos.iter().filter(|d| !d.is_tree_edge()).step_by(2).copied().collect();
    let dm = Dual::new(&lowered).unwrap();
    let items: Vec<Reverse<Element>> = elems
        .iter()
        .filter(|x| x.deco.is_tree_edge() || lowered.contains(&x.deco))
        .map(|x| Reverse(*x))
        .collect();
    let (basis, rounds) = distributed(&g, &dm, &items);
    println!("\nlowered non-tree edges {}", names(lowered.iter().map(|d| d.edge)));
    println!("  dual rank {}, max basis {} ({rounds} rounds)", dm.rank(), names(basis.iter().map(|x| x.0.edge())));
    println!("  equals greedy: {}", basis == greedy_basis(&dm, &items));
}
