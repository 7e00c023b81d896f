//! Round-synchronous CONGEST execution engine.
//!
//! Every unhalted node is stepped once per round against the messages its
//! neighbours sent in the previous round. Messages sent in the round a node
//! halts are still delivered; a halt becomes visible to neighbours in the
//! following round and costs no bandwidth.

mod input;

pub use input::{incident_labels, BatchInput, IncidentEdge, IncidentLabels};

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CommGraph, Labelling, NodeId};

/// Strict-mode capacity in words of `⌈log₂ n⌉` bits.
pub const STRICT_BANDWIDTH: u32 = 16;

/// Below this node count rounds are stepped sequentially; rayon's fork/join
/// overhead dominates on tiny graphs.
const PARALLEL_THRESHOLD: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("round {round}: {from} -> {to} carries {used} units, capacity {capacity}")]
    BandwidthExceeded { round: usize, from: NodeId, to: NodeId, used: u64, capacity: u64 },
    #[error("round {round}: {from} sent to halted node {to}")]
    MessageToHaltedNode { round: usize, from: NodeId, to: NodeId },
    #[error("round {round}: {from} sent to non-neighbour {to}")]
    NotANeighbor { round: usize, from: NodeId, to: NodeId },
    #[error("no termination within {0} rounds")]
    NonTermination(usize),
    #[error("expected {expected} node inputs, got {got}")]
    InputCount { expected: usize, got: usize },
}

/// A message payload. Each variant declares its cost in `O(log n)`-bit words
/// and, for strict accounting, its exact encoded length.
pub trait Payload: Clone + fmt::Debug + Send + Sync {
    fn tag(&self) -> &'static str;

    fn words(&self) -> u32 {
        1
    }

    /// Encoded length in bits given `⌈log₂ n⌉`-bit identifiers. Includes no
    /// variant tag; tags are assumed to share the constant header.
    fn bits(&self, id_bits: u32) -> u32 {
        self.words() * id_bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BandwidthMode {
    /// Capacity counts declared words.
    Words,
    /// Capacity counts encoded bits against `B·⌈log₂ n⌉`.
    Bits,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub bandwidth: u32,
    pub mode: BandwidthMode,
    /// Round ceiling; `None` means `10·(n + m)`.
    pub max_rounds: Option<usize>,
    pub transcript: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { bandwidth: 1, mode: BandwidthMode::Words, max_rounds: None, transcript: false }
    }
}

impl SimConfig {
    pub fn strict() -> Self {
        SimConfig { bandwidth: STRICT_BANDWIDTH, mode: BandwidthMode::Bits, ..Default::default() }
    }

    pub fn with_transcript(mut self) -> Self {
        self.transcript = true;
        self
    }

    pub fn ceiling(&self, graph: &CommGraph) -> usize {
        self.max_rounds.unwrap_or(10 * (graph.n() + graph.m()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Continue,
    Halt,
}

/// What a node knows about itself before the first round.
#[derive(Debug, Clone, Copy)]
pub struct NodeCtx<'a> {
    pub id: NodeId,
    pub n: usize,
    pub neighbors: &'a [NodeId],
}

/// A per-node state machine for one batch update.
pub trait NodeProgram: Sync {
    type Input: Send;
    type State: Send;
    type Msg: Payload;
    type Output: Send;

    fn init(&self, ctx: &NodeCtx<'_>, input: Self::Input) -> Self::State;

    fn step(&self, state: &mut Self::State, io: &mut RoundIo<'_, Self::Msg>) -> Status;

    fn finish(&self, state: Self::State) -> Self::Output;

    /// Encoded size of the output auxiliary state.
    fn output_bits(&self, _out: &Self::Output, _n: usize) -> u64 {
        0
    }
}

/// A node's interface to the current round.
pub struct RoundIo<'a, M> {
    round: usize,
    id: NodeId,
    n: usize,
    neighbors: &'a [NodeId],
    inbox: &'a [(NodeId, M)],
    halted_at: &'a [Option<usize>],
    outbox: Vec<(NodeId, M)>,
    phases: Vec<&'static str>,
}

impl<'a, M: Clone> RoundIo<'a, M> {
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self) -> &'a [NodeId] {
        self.neighbors
    }

    /// Messages sent to this node last round, ordered by sender.
    pub fn inbox(&self) -> &'a [(NodeId, M)] {
        self.inbox
    }

    /// Whether `u` announced its halt in an earlier round.
    pub fn neighbor_halted(&self, u: NodeId) -> bool {
        self.halted_at[u.index()].is_some_and(|t| t < self.round)
    }

    pub fn send(&mut self, to: NodeId, msg: M) {
        self.outbox.push((to, msg));
    }

    pub fn send_all(&mut self, msg: M) {
        for &u in self.neighbors {
            self.outbox.push((u, msg.clone()));
        }
    }

    /// Records that this node finished the named phase this round.
    pub fn mark_phase(&mut self, name: &'static str) {
        self.phases.push(name);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub rounds: usize,
    pub words_sent: u64,
    pub messages_sent: u64,
    pub max_aux_bits: u64,
    /// Last round in which any node finished each named phase.
    pub phase_breakdown: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptLine {
    pub round: usize,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub tag: &'static str,
    pub words: u32,
}

impl fmt::Display for TranscriptLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} {}", self.round, self.sender, self.receiver, self.tag, self.words)
    }
}

pub fn format_transcript(lines: &[TranscriptLine]) -> String {
    let mut out = String::new();
    for l in lines {
        let _ = writeln!(out, "{l}");
    }
    out
}

#[derive(Debug)]
pub struct RunResult<O> {
    pub outputs: Vec<O>,
    pub metrics: Metrics,
    pub transcript: Vec<TranscriptLine>,
}

struct StepResult<M> {
    node: usize,
    outbox: Vec<(NodeId, M)>,
    status: Status,
    phases: Vec<&'static str>,
}

pub struct Simulation<'g, P: NodeProgram> {
    program: &'g P,
    graph: &'g CommGraph,
    config: SimConfig,
    ceiling: usize,
    round: usize,
    states: Vec<P::State>,
    halted_at: Vec<Option<usize>>,
    inboxes: Vec<Vec<(NodeId, P::Msg)>>,
    metrics: Metrics,
    transcript: Vec<TranscriptLine>,
}

impl<'g, P: NodeProgram> Simulation<'g, P> {
    pub fn new(
        program: &'g P,
        graph: &'g CommGraph,
        inputs: Vec<P::Input>,
        config: SimConfig,
    ) -> Result<Self, SimError> {
        let n = graph.n();
        if inputs.len() != n {
            return Err(SimError::InputCount { expected: n, got: inputs.len() });
        }
        let states = inputs
            .into_iter()
            .enumerate()
            .map(|(i, input)| {
                let id = NodeId::from(i);
                let ctx = NodeCtx { id, n, neighbors: graph.neighbors(id) };
                program.init(&ctx, input)
            })
            .collect();
        let ceiling = config.ceiling(graph);
        Ok(Simulation {
            program,
            graph,
            config,
            ceiling,
            round: 0,
            states,
            halted_at: vec![None; n],
            inboxes: (0..n).map(|_| Vec::new()).collect(),
            metrics: Metrics::default(),
            transcript: Vec::new(),
        })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_done(&self) -> bool {
        self.halted_at.iter().all(Option::is_some)
    }

    pub fn halted_at(&self, v: NodeId) -> Option<usize> {
        self.halted_at[v.index()]
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    fn capacity(&self) -> u64 {
        match self.config.mode {
            BandwidthMode::Words => u64::from(self.config.bandwidth),
            BandwidthMode::Bits => u64::from(self.config.bandwidth) * u64::from(self.graph.id_bits()),
        }
    }

    fn cost(&self, msg: &P::Msg) -> u64 {
        match self.config.mode {
            BandwidthMode::Words => u64::from(msg.words()),
            BandwidthMode::Bits => u64::from(msg.bits(self.graph.id_bits())),
        }
    }

    /// Executes one synchronous round. Returns whether every node has halted.
    pub fn step_round(&mut self) -> Result<bool, SimError> {
        if self.is_done() {
            return Ok(true);
        }
        self.round += 1;
        if self.round > self.ceiling {
            return Err(SimError::NonTermination(self.ceiling));
        }
        let round = self.round;
        let n = self.graph.n();
        let graph = self.graph;
        let program = self.program;
        let inboxes = &self.inboxes;
        let halted_at = &self.halted_at;

        let run_one = |(i, state): (usize, &mut P::State)| -> Option<StepResult<P::Msg>> {
            if halted_at[i].is_some() {
                return None;
            }
            let id = NodeId::from(i);
            let mut io = RoundIo {
                round,
                id,
                n,
                neighbors: graph.neighbors(id),
                inbox: &inboxes[i],
                halted_at,
                outbox: Vec::new(),
                phases: Vec::new(),
            };
            let status = program.step(state, &mut io);
            Some(StepResult { node: i, outbox: io.outbox, status, phases: io.phases })
        };
        let results: Vec<StepResult<P::Msg>> = if n >= PARALLEL_THRESHOLD {
            self.states.par_iter_mut().enumerate().filter_map(run_one).collect()
        } else {
            self.states.iter_mut().enumerate().filter_map(run_one).collect()
        };

        for r in &results {
            if r.status == Status::Halt {
                self.halted_at[r.node] = Some(round);
            }
            for name in &r.phases {
                let e = self.metrics.phase_breakdown.entry((*name).to_string()).or_insert(0);
                *e = (*e).max(round);
            }
        }
        for inbox in &mut self.inboxes {
            inbox.clear();
        }
        let capacity = self.capacity();
        for r in results {
            let from = NodeId::from(r.node);
            let mut load: BTreeMap<NodeId, u64> = BTreeMap::new();
            for (to, msg) in r.outbox {
                if !self.graph.has_edge(from, to) {
                    return Err(SimError::NotANeighbor { round, from, to });
                }
                if self.halted_at[to.index()].is_some_and(|t| t <= round) && to != from {
                    return Err(SimError::MessageToHaltedNode { round, from, to });
                }
                let cost = self.cost(&msg);
                let used = load.entry(to).or_insert(0);
                *used += cost;
                if *used > capacity {
                    return Err(SimError::BandwidthExceeded { round, from, to, used: *used, capacity });
                }
                self.metrics.messages_sent += 1;
                self.metrics.words_sent += u64::from(msg.words());
                if self.config.transcript {
                    self.transcript.push(TranscriptLine {
                        round,
                        sender: from,
                        receiver: to,
                        tag: msg.tag(),
                        words: msg.words(),
                    });
                }
                self.inboxes[to.index()].push((from, msg));
            }
        }
        let done = self.is_done();
        if done {
            self.metrics.rounds = round;
        }
        Ok(done)
    }

    /// Runs until every node has halted.
    pub fn run(mut self) -> Result<RunResult<P::Output>, SimError> {
        while !self.step_round()? {}
        let n = self.graph.n();
        let program = self.program;
        let outputs: Vec<P::Output> = self.states.into_iter().map(|s| program.finish(s)).collect();
        self.metrics.max_aux_bits = outputs.iter().map(|o| program.output_bits(o, n)).max().unwrap_or(0);
        Ok(RunResult { outputs, metrics: self.metrics, transcript: self.transcript })
    }
}

/// Runs a program to quiescence.
pub fn run<P: NodeProgram>(
    program: &P,
    graph: &CommGraph,
    inputs: Vec<P::Input>,
    config: &SimConfig,
) -> Result<RunResult<P::Output>, SimError> {
    Simulation::new(program, graph, inputs, config.clone())?.run()
}

/// Runs a batch update: every node receives its incident old and new labels
/// together with its auxiliary state.
pub fn run_batch<P, A>(
    program: &P,
    graph: &CommGraph,
    l1: &Labelling,
    l2: &Labelling,
    aux_in: Vec<A>,
    config: &SimConfig,
) -> Result<RunResult<P::Output>, SimError>
where
    P: NodeProgram<Input = BatchInput<A>>,
    A: Send,
{
    if aux_in.len() != graph.n() {
        return Err(SimError::InputCount { expected: graph.n(), got: aux_in.len() });
    }
    let inputs = incident_labels(graph, l1, l2)
        .into_iter()
        .zip(aux_in)
        .map(|(labels, aux)| BatchInput { labels, aux })
        .collect();
    run(program, graph, inputs, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone)]
    struct Ping;

    impl Payload for Ping {
        fn tag(&self) -> &'static str {
            "ping"
        }
    }

    /// Sends `burst` pings to every neighbour in round 1, halts at `halt_round`.
    struct Burst {
        burst: usize,
        halt_round: usize,
    }

    impl NodeProgram for Burst {
        type Input = ();
        type State = Vec<(usize, NodeId)>;
        type Msg = Ping;
        type Output = Vec<(usize, NodeId)>;

        fn init(&self, _ctx: &NodeCtx<'_>, _input: ()) -> Self::State {
            Vec::new()
        }

        fn step(&self, seen: &mut Self::State, io: &mut RoundIo<'_, Ping>) -> Status {
            for (from, _) in io.inbox() {
                seen.push((io.round(), *from));
            }
            if io.round() == 1 {
                for _ in 0..self.burst {
                    io.send_all(Ping);
                }
            }
            if io.round() >= self.halt_round {
                Status::Halt
            } else {
                Status::Continue
            }
        }

        fn finish(&self, seen: Self::State) -> Self::Output {
            seen
        }
    }

    fn path2() -> CommGraph {
        CommGraph::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn two_messages_exceed_unit_capacity() {
        let g = path2();
        let err = run(&Burst { burst: 2, halt_round: 3 }, &g, vec![(), ()], &SimConfig::default()).unwrap_err();
        assert!(matches!(err, SimError::BandwidthExceeded { round: 1, used: 2, capacity: 1, .. }));
    }

    #[test]
    fn halting_round_outbox_is_delivered() {
        // Node 0 halts in round 1 after sending; node 1 receives in round 2.
        struct Once;
        impl NodeProgram for Once {
            type Input = ();
            type State = (NodeId, bool, bool);
            type Msg = Ping;
            type Output = (bool, bool);
            fn init(&self, ctx: &NodeCtx<'_>, _: ()) -> Self::State {
                (ctx.id, false, false)
            }
            fn step(&self, s: &mut Self::State, io: &mut RoundIo<'_, Ping>) -> Status {
                if s.0 == NodeId(0) {
                    io.send(NodeId(1), Ping);
                    return Status::Halt;
                }
                if io.round() == 2 {
                    s.1 = io.inbox().len() == 1;
                    s.2 = io.neighbor_halted(NodeId(0));
                    return Status::Halt;
                }
                // round 1: the halt is not yet visible
                assert!(!io.neighbor_halted(NodeId(0)));
                Status::Continue
            }
            fn finish(&self, s: Self::State) -> (bool, bool) {
                (s.1, s.2)
            }
        }
        let g = path2();
        let res = run(&Once, &g, vec![(), ()], &SimConfig::default()).unwrap();
        assert_eq!(res.outputs[1], (true, true));
        assert_eq!(res.metrics.rounds, 2);
    }

    #[test]
    fn sending_to_halted_node_is_rejected() {
        let g = path2();
        // both halt in round 1 while pings are in flight
        let err = run(&Burst { burst: 1, halt_round: 1 }, &g, vec![(), ()], &SimConfig::default()).unwrap_err();
        assert!(matches!(err, SimError::MessageToHaltedNode { round: 1, .. }));
    }

    #[test]
    fn rounds_equal_last_halt_and_words_cover_messages() {
        let g = CommGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let cfg = SimConfig::default().with_transcript();
        let res = run(&Burst { burst: 1, halt_round: 2 }, &g, vec![(); 3], &cfg).unwrap();
        assert_eq!(res.metrics.rounds, 2);
        assert_eq!(res.metrics.messages_sent, 4);
        assert!(res.metrics.words_sent >= res.metrics.messages_sent);
        assert_eq!(res.transcript.len(), 4);
        assert_eq!(res.transcript[0].to_string(), "1 0 1 ping 1");
        assert_eq!(res.outputs[1], vec![(2, NodeId(0)), (2, NodeId(2))]);
    }

    #[test]
    fn non_termination_ceiling() {
        let g = path2();
        let cfg = SimConfig { max_rounds: Some(5), ..Default::default() };
        let err = run(&Burst { burst: 0, halt_round: usize::MAX }, &g, vec![(), ()], &cfg).unwrap_err();
        assert_eq!(err, SimError::NonTermination(5));
    }

    #[test]
    fn strict_mode_counts_bits() {
        #[derive(Debug, Clone)]
        struct Wide;
        impl Payload for Wide {
            fn tag(&self) -> &'static str {
                "wide"
            }
            fn bits(&self, id_bits: u32) -> u32 {
                20 * id_bits
            }
        }
        struct SendWide;
        impl NodeProgram for SendWide {
            type Input = ();
            type State = ();
            type Msg = Wide;
            type Output = ();
            fn init(&self, _: &NodeCtx<'_>, _: ()) {}
            fn step(&self, _: &mut (), io: &mut RoundIo<'_, Wide>) -> Status {
                if io.round() == 1 {
                    io.send_all(Wide);
                    Status::Continue
                } else {
                    Status::Halt
                }
            }
            fn finish(&self, _: ()) {}
        }
        let g = path2();
        assert!(run(&SendWide, &g, vec![(), ()], &SimConfig::default()).is_ok());
        assert!(matches!(
            run(&SendWide, &g, vec![(), ()], &SimConfig::strict()),
            Err(SimError::BandwidthExceeded { .. })
        ));
    }
}
