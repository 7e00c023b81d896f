use std::path::PathBuf;
use std::process::ExitCode;

use batch_congest::harness::report::{write_json, write_metrics};
use batch_congest::harness::{run_experiment, BatchSource, ExperimentConfig, GraphSource, HarnessError, Scenario};
use batch_congest::sim::SimConfig;
use clap::{ArgGroup, Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Bandwidth {
    Default,
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Runs one scenario over a batch trace, checks every batch against its
/// oracle and writes one metrics row per batch.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
#[command(group(ArgGroup::new("graph_src").required(true).args(["graph", "gen"])))]
#[command(group(ArgGroup::new("batch_src").required(true).args(["batches", "gen_batches"])))]
struct Args {
    /// mst | cliques | local1 | universal-apsp | universal-diameter | cc-universal | cc-matmul | cc-triangles
    #[arg(long)]
    scenario: String,
    /// Graph file (`n m` header, then `u v` lines).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generated graph: KIND,n,seed (random-gnm accepts KIND,n,seed,m).
    #[arg(long, value_name = "KIND,n,seed")]
    gen: Option<String>,
    /// Batch trace file (`u v label` lines, blocks separated by `---`).
    #[arg(long)]
    batches: Option<PathBuf>,
    /// Generated batches: KIND,alpha,count,seed with KIND fixed|uniform.
    #[arg(long, value_name = "KIND,alpha,count,seed")]
    gen_batches: Option<String>,
    /// Initial labelling file; random when omitted.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "default")]
    bandwidth: Bandwidth,
    #[arg(long, value_enum, default_value = "on")]
    oracle: Switch,
    #[arg(long, value_name = "OUT.csv")]
    metrics: PathBuf,
    #[arg(long, value_name = "OUT.txt")]
    transcript: Option<PathBuf>,
    /// Append fitted constants to the metrics file.
    #[arg(long)]
    summary: bool,
    /// Also write rows and summary as JSON.
    #[arg(long, value_name = "OUT.json")]
    json: Option<PathBuf>,
    /// Radius for the local1 scenario.
    #[arg(long, default_value_t = 1)]
    radius: usize,
}

fn config(args: &Args) -> Result<ExperimentConfig, HarnessError> {
    let scenario: Scenario = args.scenario.parse()?;
    let graph = match (&args.graph, &args.gen) {
        (Some(p), _) => GraphSource::File(p.clone()),
        (None, Some(spec)) => GraphSource::parse_gen(spec)?,
        (None, None) => unreachable!("clap requires a graph source"),
    };
    let batches = match (&args.batches, &args.gen_batches) {
        (Some(p), _) => BatchSource::File(p.clone()),
        (None, Some(spec)) => BatchSource::parse_gen(spec)?,
        (None, None) => unreachable!("clap requires a batch source"),
    };
    let mut sim = match args.bandwidth {
        Bandwidth::Default => SimConfig::default(),
        Bandwidth::Strict => SimConfig::strict(),
    };
    sim.transcript = args.transcript.is_some();
    let mut cfg = ExperimentConfig::new(scenario, graph, batches);
    cfg.labels = args.labels.clone();
    cfg.sim = sim;
    cfg.oracle = matches!(args.oracle, Switch::On);
    cfg.radius = args.radius;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = match config(&args).and_then(|c| run_experiment(&c)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = write_metrics(&args.metrics, &report.rows, args.summary.then_some(&report.summary))
        .and_then(|_| match &args.json {
            Some(p) => write_json(p, &report.rows, &report.summary),
            None => Ok(()),
        })
        .and_then(|_| match (&args.transcript, &report.transcript) {
            (Some(p), Some(t)) => Ok(std::fs::write(p, t)?),
            _ => Ok(()),
        });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if args.summary {
        print!("{}", report.summary.comment_lines());
    }
    for f in &report.failures {
        eprintln!("oracle mismatch: {f}");
    }
    if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
