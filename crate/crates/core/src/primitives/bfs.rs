//! BFS spanning tree rooted at the minimum identifier.
//!
//! Every node floods its best `(root, dist, parent)` triple. Since the
//! global minimum identifier spreads one hop per round, the first offer a
//! node hears for it already carries the exact distance, and the smallest
//! sender among simultaneous offers becomes the parent. Subtree sizes are
//! then convergecast; when the root counts all `n` nodes it sends `Done`
//! down the tree and each node finishes on forwarding it.

use std::collections::BTreeMap;

use crate::graph::{bits_for, NodeId};
use crate::sim::Payload;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BfsMsg {
    Offer { root: NodeId, dist: u32, parent: NodeId },
    Count { root: NodeId, count: u32 },
    Done,
}

impl Payload for BfsMsg {
    fn tag(&self) -> &'static str {
        match self {
            BfsMsg::Offer { .. } => "bfs-offer",
            BfsMsg::Count { .. } => "bfs-count",
            BfsMsg::Done => "bfs-done",
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            BfsMsg::Offer { dist, .. } => 2 * id_bits + bits_for(u64::from(*dist)),
            BfsMsg::Count { count, .. } => id_bits + bits_for(u64::from(*count)),
            BfsMsg::Done => 1,
        }
    }
}

/// A node's place in the BFS tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePosition {
    pub me: NodeId,
    pub root: NodeId,
    /// `None` at the root.
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub children: Vec<NodeId>,
}

impl TreePosition {
    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }
}

/// The assembled global tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: NodeId,
    /// The root maps to itself.
    pub parent: Vec<NodeId>,
    pub depth: Vec<usize>,
}

impl BfsTree {
    pub fn from_positions(positions: &[TreePosition]) -> Self {
        BfsTree {
            root: positions[0].root,
            parent: positions.iter().map(|p| p.parent.unwrap_or(p.me)).collect(),
            depth: positions.iter().map(|p| p.depth).collect(),
        }
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }
}

type Best = (NodeId, u32, NodeId);

/// Per-node BFS state machine.
#[derive(Debug, Clone)]
pub struct BfsBuilder {
    me: NodeId,
    n: usize,
    neighbors: Vec<NodeId>,
    best: Best,
    latest: BTreeMap<NodeId, Best>,
    counts: BTreeMap<NodeId, u32>,
    announce: bool,
    counted: Option<NodeId>,
    done_from_parent: bool,
    finished: bool,
}

impl BfsBuilder {
    pub fn new(me: NodeId, n: usize, neighbors: &[NodeId]) -> Self {
        BfsBuilder {
            me,
            n,
            neighbors: neighbors.to_vec(),
            best: (me, 0, me),
            latest: BTreeMap::new(),
            counts: BTreeMap::new(),
            announce: true,
            counted: None,
            done_from_parent: false,
            finished: false,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    fn children(&self) -> Option<Vec<NodeId>> {
        let (root, ..) = self.best;
        let mut kids = Vec::new();
        for u in &self.neighbors {
            let (r, _, p) = self.latest.get(u)?;
            if *r != root {
                return None;
            }
            if *p == self.me && *u != self.me {
                kids.push(*u);
            }
        }
        Some(kids)
    }

    fn position(&self) -> TreePosition {
        let (root, dist, parent) = self.best;
        TreePosition {
            me: self.me,
            root,
            parent: (root != self.me).then_some(parent),
            depth: dist as usize,
            children: self.children().unwrap_or_default(),
        }
    }

    /// Processes one round. Returns the final position in the round the
    /// node finishes (after it has queued `Done` for its children).
    pub fn round(&mut self, inbox: &[(NodeId, BfsMsg)], out: &mut Vec<(NodeId, BfsMsg)>) -> Option<TreePosition> {
        if self.finished {
            return None;
        }
        for (from, msg) in inbox {
            match msg {
                BfsMsg::Offer { root, dist, parent } => {
                    self.latest.insert(*from, (*root, *dist, *parent));
                    let cand = (*root, dist + 1, *from);
                    if cand < self.best {
                        if cand.0 != self.best.0 {
                            self.counts.clear();
                        }
                        self.best = cand;
                        self.announce = true;
                    }
                }
                BfsMsg::Count { root, count } => {
                    if *root == self.best.0 {
                        self.counts.insert(*from, *count);
                    }
                }
                BfsMsg::Done => self.done_from_parent = true,
            }
        }
        let (root, dist, parent) = self.best;
        if self.announce {
            self.announce = false;
            for &u in &self.neighbors {
                out.push((u, BfsMsg::Offer { root, dist, parent }));
            }
            return None;
        }
        if self.done_from_parent {
            let pos = self.position();
            for &c in &pos.children {
                out.push((c, BfsMsg::Done));
            }
            self.finished = true;
            return Some(pos);
        }
        if self.counted != Some(root) {
            if let Some(kids) = self.children() {
                if kids.iter().all(|c| self.counts.contains_key(c)) {
                    let total = 1 + kids.iter().map(|c| self.counts[c]).sum::<u32>();
                    self.counted = Some(root);
                    if root == self.me {
                        if total as usize == self.n {
                            for &c in &kids {
                                out.push((c, BfsMsg::Done));
                            }
                            self.finished = true;
                            return Some(self.position());
                        }
                    } else {
                        out.push((parent, BfsMsg::Count { root, count: total }));
                    }
                }
            }
        }
        None
    }
}
