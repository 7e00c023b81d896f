//! Low-outdegree acyclic orientation of the changed-edge graph.
//!
//! Iteration `d` lasts `T(d) = ⌈log_{3/2} 2^{d+1}⌉` rounds. In each round a
//! node with at most `f(d) = 3·√(2^{d+1})` unoriented incident edges orients
//! all of them outward and stops; if both endpoints stop in the same round
//! the edge points to the higher identifier.

use std::collections::BTreeMap;

use crate::graph::{id_bits, NodeId};

/// Outdegree threshold of iteration `d`.
pub fn iteration_bound(d: usize) -> f64 {
    3.0 * 2f64.powi(d as i32 + 1).sqrt()
}

/// Round count of iteration `d`.
pub fn iteration_length(d: usize) -> usize {
    let x = (d as f64 + 1.0) * 2f64.ln() / 1.5f64.ln();
    // guard against x landing a hair above an integer
    (x - 1e-9).ceil() as usize
}

/// Number of iterations scheduled for a graph on `n` nodes: `⌈log₂ m⌉`
/// with `m < n²`.
pub fn iteration_count(n: usize) -> usize {
    2 * id_bits(n) as usize
}

/// Iteration containing the 1-based round `t` of the orientation phase.
pub fn iteration_of_round(t: usize, n: usize) -> usize {
    let mut start = 1;
    let last = iteration_count(n);
    for d in 1..=last {
        let len = iteration_length(d);
        if t < start + len {
            return d;
        }
        start += len;
    }
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeDir {
    Unoriented,
    Out,
    In,
}

/// Per-node orientation state over the incident changed edges.
#[derive(Debug, Clone)]
pub struct Orienter {
    me: NodeId,
    n: usize,
    dirs: BTreeMap<NodeId, EdgeDir>,
    /// Round and iteration in which this node stopped.
    halted: Option<(usize, usize)>,
    resolved: bool,
}

impl Orienter {
    pub fn new(me: NodeId, n: usize, changed_neighbors: impl IntoIterator<Item = NodeId>) -> Self {
        let dirs = changed_neighbors.into_iter().map(|u| (u, EdgeDir::Unoriented)).collect();
        Orienter { me, n, dirs, halted: None, resolved: false }
    }

    /// Phase round `t` (1-based). `flags` are the neighbours that stopped in
    /// the previous round and oriented their shared edge towards this node.
    /// Returns the neighbours to notify when this node stops now.
    pub fn round(&mut self, t: usize, flags: &[NodeId]) -> Vec<NodeId> {
        for &u in flags {
            let dir = self.dirs.get_mut(&u).expect("flag on a changed edge");
            match (*dir, self.halted) {
                (EdgeDir::Unoriented, _) => *dir = EdgeDir::In,
                // both stopped in the same round: head is the higher id
                (EdgeDir::Out, Some((h, _))) if h + 1 == t => {
                    if u < self.me {
                        *dir = EdgeDir::In;
                    }
                }
                _ => unreachable!("flag on an already oriented edge"),
            }
        }
        if let Some((h, _)) = self.halted {
            if h < t {
                self.resolved = true;
            }
            return Vec::new();
        }
        let d = iteration_of_round(t, self.n);
        let open: Vec<NodeId> =
            self.dirs.iter().filter(|(_, dir)| **dir == EdgeDir::Unoriented).map(|(u, _)| *u).collect();
        let last_round = t >= (1..=iteration_count(self.n)).map(iteration_length).sum::<usize>();
        if open.len() as f64 <= iteration_bound(d) || last_round {
            for u in &open {
                self.dirs.insert(*u, EdgeDir::Out);
            }
            self.halted = Some((t, d));
            return open;
        }
        Vec::new()
    }

    pub fn halted(&self) -> Option<(usize, usize)> {
        self.halted
    }

    /// True from the round after stopping, when same-round conflicts are
    /// settled and the out-edge set is final.
    pub fn is_resolved(&self) -> bool {
        self.resolved
    }

    pub fn out_neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.dirs.iter().filter(|(_, d)| **d == EdgeDir::Out).map(|(u, _)| *u)
    }
}
