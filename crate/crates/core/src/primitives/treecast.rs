//! Pipelined convergecast and broadcast over a rooted tree.
//!
//! Items travel up in ascending order, at most one per tree edge per
//! round. A node forwards its next item only once every child stream has
//! either produced a head or ended, so the merged stream it emits is sorted.
//! A [`Retain`] filter decides which merged items are forwarded; discarded
//! items cost nothing. The root accepts the filtered stream and immediately
//! pipelines it down to every node, followed by an end marker.

use std::cmp::Reverse;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use super::bfs::TreePosition;
use crate::graph::NodeId;
use crate::sim::Payload;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CastError {
    #[error("filter re-admits an element it discarded earlier")]
    FilterNotMonotone,
    #[error("child {0} sent items out of order")]
    UnsortedStream(NodeId),
}

/// Something that can travel in a tree cast.
pub trait Item: Ord + Clone + fmt::Debug + Send + Sync {
    fn words(&self) -> u32 {
        1
    }

    fn bits(&self, id_bits: u32) -> u32;
}

impl<T: Item> Item for Reverse<T> {
    fn words(&self) -> u32 {
        self.0.words()
    }

    fn bits(&self, id_bits: u32) -> u32 {
        self.0.bits(id_bits)
    }
}

impl Item for u64 {
    fn bits(&self, _id_bits: u32) -> u32 {
        crate::graph::bits_for(*self)
    }
}

/// Retention rule applied to the merged, sorted stream at every node.
pub trait Retain<T> {
    fn admit(&mut self, item: &T) -> bool;

    /// Called once the stream is complete with every item this node dropped.
    fn verify(&self, _discarded: &[T]) -> Result<(), CastError> {
        Ok(())
    }
}

/// Keeps every distinct item: plain set broadcast.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeepAll;

impl<T> Retain<T> for KeepAll {
    fn admit(&mut self, _item: &T) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CastMsg<T> {
    Up(T),
    UpEnd,
    Down(T),
    DownEnd,
}

impl<T: Item> Payload for CastMsg<T> {
    fn tag(&self) -> &'static str {
        match self {
            CastMsg::Up(_) => "cast-up",
            CastMsg::UpEnd => "cast-up-end",
            CastMsg::Down(_) => "cast-down",
            CastMsg::DownEnd => "cast-down-end",
        }
    }

    fn words(&self) -> u32 {
        match self {
            CastMsg::Up(x) | CastMsg::Down(x) => x.words(),
            _ => 1,
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            CastMsg::Up(x) | CastMsg::Down(x) => x.bits(id_bits),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Stream<T> {
    queue: VecDeque<T>,
    ended: bool,
    last: Option<T>,
}

/// Per-node tree cast state machine.
#[derive(Debug, Clone)]
pub struct TreeCast<T, F> {
    pos: TreePosition,
    local: VecDeque<T>,
    children: BTreeMap<NodeId, Stream<T>>,
    filter: F,
    discarded: Vec<T>,
    last_merged: Option<T>,
    merged_all: bool,
    up_end_sent: bool,
    down_queue: VecDeque<T>,
    down_end: bool,
    received: Vec<T>,
    finished: bool,
}

impl<T: Item, F: Retain<T>> TreeCast<T, F> {
    pub fn new(pos: TreePosition, mut local: Vec<T>, filter: F) -> Self {
        local.sort();
        local.dedup();
        let children = pos.children.iter().map(|&c| (c, Stream { queue: VecDeque::new(), ended: false, last: None })).collect();
        TreeCast {
            pos,
            local: local.into(),
            children,
            filter,
            discarded: Vec::new(),
            last_merged: None,
            merged_all: false,
            up_end_sent: false,
            down_queue: VecDeque::new(),
            down_end: false,
            received: Vec::new(),
            finished: false,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn filter(&self) -> &F {
        &self.filter
    }

    /// Smallest pending item, or `None` if some child stream is still open
    /// and empty (or nothing is left).
    fn next_merged(&mut self) -> Option<T> {
        let mut best = self.local.front();
        for s in self.children.values() {
            match s.queue.front() {
                Some(x) => {
                    if best.is_none_or(|b| x < b) {
                        best = Some(x);
                    }
                }
                None if !s.ended => return None,
                None => {}
            }
        }
        let best = best?.clone();
        if self.local.front() == Some(&best) {
            self.local.pop_front();
        }
        for s in self.children.values_mut() {
            if s.queue.front() == Some(&best) {
                s.queue.pop_front();
            }
        }
        Some(best)
    }

    fn exhausted(&self) -> bool {
        self.local.is_empty() && self.children.values().all(|s| s.ended && s.queue.is_empty())
    }

    /// Processes one round. Returns the broadcast result in the round this
    /// node forwards the end marker.
    pub fn round(
        &mut self,
        inbox: &[(NodeId, CastMsg<T>)],
        out: &mut Vec<(NodeId, CastMsg<T>)>,
    ) -> Result<Option<Vec<T>>, CastError> {
        if self.finished {
            return Ok(None);
        }
        for (from, msg) in inbox {
            match msg {
                CastMsg::Up(x) => {
                    let s = self.children.get_mut(from).expect("up message from a child");
                    if s.last.as_ref().is_some_and(|l| l >= x) {
                        return Err(CastError::UnsortedStream(*from));
                    }
                    s.last = Some(x.clone());
                    s.queue.push_back(x.clone());
                }
                CastMsg::UpEnd => {
                    self.children.get_mut(from).expect("up-end from a child").ended = true;
                }
                CastMsg::Down(x) => {
                    self.received.push(x.clone());
                    self.down_queue.push_back(x.clone());
                }
                CastMsg::DownEnd => self.down_end = true,
            }
        }

        if !self.merged_all {
            loop {
                if self.exhausted() {
                    self.merged_all = true;
                    break;
                }
                let Some(x) = self.next_merged() else { break };
                if self.last_merged.as_ref() == Some(&x) {
                    continue;
                }
                self.last_merged = Some(x.clone());
                if self.filter.admit(&x) {
                    match self.pos.parent {
                        Some(p) => out.push((p, CastMsg::Up(x))),
                        None => {
                            self.received.push(x.clone());
                            self.down_queue.push_back(x);
                        }
                    }
                    break;
                }
                self.discarded.push(x);
            }
        }
        if self.merged_all && !self.up_end_sent {
            match self.pos.parent {
                Some(p) => {
                    if !out.iter().any(|(to, _)| *to == p) {
                        out.push((p, CastMsg::UpEnd));
                        self.up_end_sent = true;
                    }
                }
                None => {
                    self.up_end_sent = true;
                    self.down_end = true;
                }
            }
        }

        if let Some(x) = self.down_queue.pop_front() {
            for &c in &self.pos.children {
                out.push((c, CastMsg::Down(x.clone())));
            }
        } else if self.down_end && self.up_end_sent {
            for &c in &self.pos.children {
                out.push((c, CastMsg::DownEnd));
            }
            self.filter.verify(&self.discarded)?;
            self.finished = true;
            return Ok(Some(std::mem::take(&mut self.received)));
        }
        Ok(None)
    }
}
