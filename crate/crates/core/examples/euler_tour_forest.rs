//! Euler-tour labels of a spanning forest: reroot, cut and join on a small
//! tree, the per-node aux encoding, and the tour rebuilt from the aux.
//!
//!     cargo run --example euler_tour_forest

use batch_congest::ett::aux::{decode, encode};
use batch_congest::ett::EulerTourForest;
use batch_congest::graph::{EdgeId, NodeId};

fn dump(f: &EulerTourForest, what: &str) {
    println!("{what}");
    for e in f.tree_edges() {
        println!("  {}->{} : {:?}   {}->{} : {:?}", e.u, e.v, f.label(e.u, e.v), e.v, e.u, f.label(e.v, e.u));
    }
    f.validate().unwrap();
}

fn main() {
    let n = 6;
    let path = [(0, 1), (1, 2), (2, 3), (1, 4)].map(|(a, b)| EdgeId::of(a, b));
    let mut f = EulerTourForest::from_tree(n, path).unwrap();
    dump(&f, "tree 0-1-2-3 with 1-4, node 5 alone");

    f.root(NodeId(2));
    dump(&f, "rerooted at 2");

    f.cut(EdgeId::of(1, 2)).unwrap();
    dump(&f, "after cutting 1-2");
    println!("  components: {:?}", f.partition());

    f.join(EdgeId::of(3, 5)).unwrap();
    f.join(EdgeId::of(4, 5)).unwrap();
    dump(&f, "after joining 3-5 and 4-5");

    let aux = encode(&f).unwrap();
    for (v, a) in aux.iter().enumerate() {
        println!("  aux[{v}] root {} parent {} down {:?} up {:?}", a.root, a.parent, a.down, a.up);
    }
    let back = decode(&aux).unwrap();
    println!("decoded tour has the same edges: {}", back.tree_edges() == f.tree_edges());
    println!("restriction to 3-5: {:?}", f.restrict([EdgeId::of(3, 5)]).edges().collect::<Vec<_>>());
}
