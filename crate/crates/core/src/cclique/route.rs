//! Routing on the complete graph.
//!
//! [`Router`] delivers addressed messages in two hops: the `j`-th message of
//! a node (sorted by destination) goes through intermediary `me + j mod n`,
//! so a node's sends and a destination's arrivals are spread over all links.
//! A first round tells every node how many messages will reach it directly
//! and how many it relays, which is how everyone knows when to stop.
//!
//! [`AllCast`] replicates every node's items to all nodes: counts are
//! exchanged, items are numbered globally and spread so that intermediary
//! `w` holds the items with index `≡ w (mod n)`, and each intermediary then
//! broadcasts what it holds. It takes `2 + ⌈max_v k_v / n⌉ + ⌈α / n⌉`
//! rounds on a fixed schedule, so all nodes finish together.

use std::collections::{BTreeMap, VecDeque};

use crate::graph::{bits_for, NodeId};
use crate::primitives::Item;
use crate::sim::Payload;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CcMsg<T> {
    RouteCount { to_you: u32, via_you: u32 },
    Relay { src: NodeId, dst: NodeId, item: T },
    Deliver { src: NodeId, item: T },
    CastCount(u32),
    Spread(T),
    Cast(T),
    Total(i64),
}

impl<T: Item> Payload for CcMsg<T> {
    fn tag(&self) -> &'static str {
        match self {
            CcMsg::RouteCount { .. } => "route-count",
            CcMsg::Relay { .. } => "route-relay",
            CcMsg::Deliver { .. } => "route-deliver",
            CcMsg::CastCount(_) => "allcast-count",
            CcMsg::Spread(_) => "allcast-spread",
            CcMsg::Cast(_) => "allcast-cast",
            CcMsg::Total(_) => "total",
        }
    }

    fn words(&self) -> u32 {
        match self {
            CcMsg::Relay { item, .. } | CcMsg::Deliver { item, .. } | CcMsg::Spread(item) | CcMsg::Cast(item) => {
                item.words()
            }
            _ => 1,
        }
    }

    fn bits(&self, id_bits: u32) -> u32 {
        match self {
            CcMsg::RouteCount { to_you, via_you } => {
                bits_for(u64::from(*to_you)) + bits_for(u64::from(*via_you))
            }
            CcMsg::Relay { item, .. } => 2 * id_bits + item.bits(id_bits),
            CcMsg::Deliver { item, .. } => id_bits + item.bits(id_bits),
            CcMsg::CastCount(k) => bits_for(u64::from(*k)),
            CcMsg::Spread(item) | CcMsg::Cast(item) => item.bits(id_bits),
            CcMsg::Total(t) => 1 + bits_for(t.unsigned_abs()),
        }
    }
}

/// Per-link FIFO queues; one message per link per round.
#[derive(Debug, Clone)]
struct Links<T> {
    queues: BTreeMap<NodeId, VecDeque<CcMsg<T>>>,
}

impl<T: Clone> Links<T> {
    fn new() -> Self {
        Links { queues: BTreeMap::new() }
    }

    fn push(&mut self, to: NodeId, m: CcMsg<T>) {
        self.queues.entry(to).or_default().push_back(m);
    }

    fn drain_round(&mut self, out: &mut Vec<(NodeId, CcMsg<T>)>) {
        for (to, q) in self.queues.iter_mut() {
            if let Some(m) = q.pop_front() {
                out.push((*to, m));
            }
        }
        self.queues.retain(|_, q| !q.is_empty());
    }

    fn is_empty(&self) -> bool {
        self.queues.is_empty()
    }
}

/// Two-hop point-to-point routing state machine.
#[derive(Debug, Clone)]
pub struct Router<T> {
    me: NodeId,
    n: usize,
    pending: Option<Vec<(NodeId, T)>>,
    links: Links<T>,
    counts_seen: usize,
    expected_final: usize,
    expected_relay: usize,
    got_final: usize,
    got_relay: usize,
    delivered: Vec<(NodeId, T)>,
    done: bool,
}

impl<T: Item> Router<T> {
    pub fn new(me: NodeId, n: usize, demands: Vec<(NodeId, T)>) -> Self {
        Router {
            me,
            n,
            pending: Some(demands),
            links: Links::new(),
            counts_seen: 0,
            expected_final: 0,
            expected_relay: 0,
            got_final: 0,
            got_relay: 0,
            delivered: Vec::new(),
            done: false,
        }
    }

    /// Takes the router's share of the inbox; other messages are ignored.
    pub fn receive(&mut self, m: &CcMsg<T>) {
        match m {
            CcMsg::RouteCount { to_you, via_you } => {
                self.counts_seen += 1;
                self.expected_final += *to_you as usize;
                self.expected_relay += *via_you as usize;
            }
            CcMsg::Relay { src, dst, item } => {
                self.got_relay += 1;
                self.links.push(*dst, CcMsg::Deliver { src: *src, item: item.clone() });
            }
            CcMsg::Deliver { src, item } => {
                self.got_final += 1;
                self.delivered.push((*src, item.clone()));
            }
            _ => {}
        }
    }

    /// One round. Returns the delivered messages, sorted, once everything
    /// addressed to or relayed through this node has been handled.
    pub fn round(&mut self, out: &mut Vec<(NodeId, CcMsg<T>)>) -> Option<Vec<(NodeId, T)>> {
        if self.done {
            return None;
        }
        if let Some(mut demands) = self.pending.take() {
            demands.sort();
            let mut to_you = vec![0u32; self.n];
            let mut via_you = vec![0u32; self.n];
            for (j, (dst, item)) in demands.into_iter().enumerate() {
                let w = NodeId::from((self.me.index() + j) % self.n);
                if dst == self.me {
                    self.delivered.push((self.me, item));
                } else if w == self.me || w == dst {
                    to_you[dst.index()] += 1;
                    self.links.push(dst, CcMsg::Deliver { src: self.me, item });
                } else {
                    to_you[dst.index()] += 1;
                    via_you[w.index()] += 1;
                    self.links.push(w, CcMsg::Relay { src: self.me, dst, item });
                }
            }
            // counts go out first on every link
            for x in 0..self.n {
                let x = NodeId::from(x);
                if x != self.me {
                    out.push((x, CcMsg::RouteCount { to_you: to_you[x.index()], via_you: via_you[x.index()] }));
                }
            }
            return None;
        }
        self.links.drain_round(out);
        let settled = self.counts_seen + 1 == self.n
            && self.got_final == self.expected_final
            && self.got_relay == self.expected_relay
            && self.links.is_empty();
        if settled {
            self.done = true;
            let mut d = std::mem::take(&mut self.delivered);
            d.sort();
            return Some(d);
        }
        None
    }
}

/// Replicates every node's items to all nodes on a fixed schedule.
#[derive(Debug, Clone)]
pub struct AllCast<T> {
    me: NodeId,
    n: usize,
    round: usize,
    own: Vec<T>,
    counts: Vec<u32>,
    links: Links<T>,
    held: Vec<T>,
    received: Vec<T>,
    /// Length of the spread and broadcast stages once counts are known.
    schedule: Option<(usize, usize)>,
    done: bool,
}

impl<T: Item> AllCast<T> {
    pub fn new(me: NodeId, n: usize, mut items: Vec<T>) -> Self {
        items.sort();
        let mut counts = vec![0; n];
        counts[me.index()] = items.len() as u32;
        AllCast {
            me,
            n,
            round: 0,
            own: items,
            counts,
            links: Links::new(),
            held: Vec::new(),
            received: Vec::new(),
            schedule: None,
            done: false,
        }
    }

    pub fn receive(&mut self, from: NodeId, m: &CcMsg<T>) {
        match m {
            CcMsg::CastCount(k) => self.counts[from.index()] = *k,
            CcMsg::Spread(x) => self.held.push(x.clone()),
            CcMsg::Cast(x) => self.received.push(x.clone()),
            _ => {}
        }
    }

    /// Rounds this all-cast takes given every node's item count.
    pub fn rounds_for(counts: &[u32]) -> usize {
        let n = counts.len();
        let total: usize = counts.iter().map(|&k| k as usize).sum();
        let spread = counts.iter().map(|&k| (k as usize).div_ceil(n)).max().unwrap_or(0);
        2 + spread + total.div_ceil(n)
    }

    pub fn round(&mut self, out: &mut Vec<(NodeId, CcMsg<T>)>) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        self.round += 1;
        if self.round == 1 {
            let k = self.own.len() as u32;
            for x in (0..self.n).map(NodeId::from).filter(|&x| x != self.me) {
                out.push((x, CcMsg::CastCount(k)));
            }
            return None;
        }
        if self.round == 2 {
            let total: usize = self.counts.iter().map(|&k| k as usize).sum();
            let spread = self.counts.iter().map(|&k| (k as usize).div_ceil(self.n)).max().unwrap_or(0);
            self.schedule = Some((spread, total.div_ceil(self.n)));
            let offset: usize = self.counts[..self.me.index()].iter().map(|&k| k as usize).sum();
            for (t, x) in std::mem::take(&mut self.own).into_iter().enumerate() {
                let w = NodeId::from((offset + t) % self.n);
                if w == self.me {
                    self.held.push(x);
                } else {
                    self.links.push(w, CcMsg::Spread(x));
                }
            }
        }
        let (spread, cast) = self.schedule.expect("set in round 2");
        let t = self.round - 2;
        if t < spread {
            self.links.drain_round(out);
        } else if t < spread + cast {
            let s = t - spread;
            if s == 0 {
                self.held.sort();
            }
            if let Some(x) = self.held.get(s) {
                for y in (0..self.n).map(NodeId::from).filter(|&y| y != self.me) {
                    out.push((y, CcMsg::Cast(x.clone())));
                }
            }
        } else {
            self.done = true;
            let mut all = std::mem::take(&mut self.received);
            all.append(&mut self.held);
            all.sort();
            return Some(all);
        }
        None
    }
}
