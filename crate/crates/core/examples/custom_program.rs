//! Writing a node program for the simulator: every node learns the largest
//! identifier by flooding, and halts once it has heard nothing new for
//! `n` rounds. Prints the metrics and the first transcript lines.
//!
//!     cargo run --example custom_program

use batch_congest::graph::NodeId;
use batch_congest::harness::gen;
use batch_congest::sim::{format_transcript, run, NodeCtx, NodeProgram, Payload, RoundIo, SimConfig, Status};

#[derive(Debug, Clone)]
struct Max(NodeId);

impl Payload for Max {
    fn tag(&self) -> &'static str {
        "max"
    }
}

struct FloodMax;

struct State {
    best: NodeId,
    fresh: bool,
    quiet: usize,
    n: usize,
}

impl NodeProgram for FloodMax {
    type Input = ();
    type State = State;
    type Msg = Max;
    type Output = NodeId;

    fn init(&self, ctx: &NodeCtx<'_>, _: ()) -> State {
        State { best: ctx.id, fresh: true, quiet: 0, n: ctx.n }
    }

    fn step(&self, st: &mut State, io: &mut RoundIo<'_, Max>) -> Status {
        for (_, Max(x)) in io.inbox() {
            if *x > st.best {
                st.best = *x;
                st.fresh = true;
            }
        }
        if st.fresh {
            io.send_all(Max(st.best));
            st.fresh = false;
            st.quiet = 0;
        } else {
            st.quiet += 1;
        }
        if st.quiet >= st.n {
            io.mark_phase("flood");
            return Status::Halt;
        }
        Status::Continue
    }

    fn finish(&self, st: State) -> NodeId {
        st.best
    }
}

fn main() {
    let g = gen::grid(4, 5).unwrap();
    let res = run(&FloodMax, &g, vec![(); g.n()], &SimConfig::default().with_transcript()).unwrap();
    println!("grid 4x5, every node knows {:?}", res.outputs.iter().max().unwrap());
    assert!(res.outputs.iter().all(|&x| x == NodeId(19)));
    let m = &res.metrics;
    println!("rounds {}  messages {}  words {}  phases {:?}", m.rounds, m.messages_sent, m.words_sent, m.phase_breakdown);
    println!("first transcript lines (round sender receiver tag words):");
    print!("{}", format_transcript(&res.transcript[..6]));
}
