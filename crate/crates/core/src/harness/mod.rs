//! Experiment driver: instance generation, batch runs with oracle checks,
//! and reporting.
//!
//! An experiment is one scenario run over one graph and one batch trace.
//! Every batch is applied, run through the distributed algorithm, checked
//! against a sequential oracle (when enabled) and recorded as one
//! [`MetricsRow`].

pub mod corpus;
pub mod gen;
pub mod report;
mod scenario;

use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::cclique::CcError;
use crate::graph::io::{parse_batches, parse_labelling, FileError, GraphFile, IdMap, LabelKind};
use crate::graph::{apply_batch, BatchUpdate, CommGraph, GraphError, Labelling};
use crate::mst::MstError;
use crate::sim::{format_transcript, SimConfig, SimError};
use gen::{AlphaDist, GenError, GraphKind, LabelDomain};
pub use report::{fit_linear, fit_power, LinearFit, MetricsRow, Summary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("scenario `{0}` needs a complete communication graph")]
    NeedsClique(Scenario),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Mst(#[from] MstError),
    #[error(transparent)]
    Clique(#[from] CcError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Mst,
    Cliques,
    Local1,
    UniversalApsp,
    UniversalDiameter,
    CcUniversal,
    CcMatmul,
    CcTriangles,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Mst,
        Scenario::Cliques,
        Scenario::Local1,
        Scenario::UniversalApsp,
        Scenario::UniversalDiameter,
        Scenario::CcUniversal,
        Scenario::CcMatmul,
        Scenario::CcTriangles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Mst => "mst",
            Scenario::Cliques => "cliques",
            Scenario::Local1 => "local1",
            Scenario::UniversalApsp => "universal-apsp",
            Scenario::UniversalDiameter => "universal-diameter",
            Scenario::CcUniversal => "cc-universal",
            Scenario::CcMatmul => "cc-matmul",
            Scenario::CcTriangles => "cc-triangles",
        }
    }

    pub fn needs_clique(self) -> bool {
        matches!(self, Scenario::CcUniversal | Scenario::CcMatmul | Scenario::CcTriangles)
    }

    pub fn label_kind(self) -> LabelKind {
        match self {
            Scenario::Mst | Scenario::CcMatmul => LabelKind::Weight,
            _ => LabelKind::Bit,
        }
    }

    /// Alphabet for generated labellings and batches.
    pub fn default_domain(self, n: usize) -> LabelDomain {
        match self {
            Scenario::Mst => {
                let max = (n as i64).saturating_pow(2).max(4);
                LabelDomain::Weights { max, inf_rate: 0.02 }
            }
            Scenario::CcMatmul => LabelDomain::Weights { max: 9, inf_rate: 0.0 },
            _ => LabelDomain::Bits { p: 0.3 },
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| config_err(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Gen { kind: GraphKind, n: usize, seed: u64 },
}

impl GraphSource {
    /// Parses `KIND,n,seed` (random-gnm takes an optional fourth field `m`).
    pub fn parse_gen(spec: &str) -> Result<Self, HarnessError> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(config_err(format!("expected KIND,n,seed, got `{spec}`")));
        }
        let mut kind: GraphKind = parts[0].parse()?;
        let n = parse_num(parts[1], "n")?;
        let seed = parse_num(parts[2], "seed")?;
        match (&mut kind, parts.get(3)) {
            (GraphKind::RandomGnm { m }, Some(x)) => *m = parse_num(x, "m")? as usize,
            (_, Some(_)) => return Err(config_err("only random-gnm takes an edge count")),
            _ => {}
        }
        Ok(GraphSource::Gen { kind, n: n as usize, seed })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BatchSource {
    File(PathBuf),
    Gen { dist: AlphaDist, alpha: usize, count: usize, seed: u64 },
}

impl BatchSource {
    /// Parses `KIND,α,count,seed` with `KIND` one of `fixed`, `uniform`.
    pub fn parse_gen(spec: &str) -> Result<Self, HarnessError> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(config_err(format!("expected KIND,alpha,count,seed, got `{spec}`")));
        }
        Ok(BatchSource::Gen {
            dist: parts[0].parse()?,
            alpha: parse_num(parts[1], "alpha")? as usize,
            count: parse_num(parts[2], "count")? as usize,
            seed: parse_num(parts[3], "seed")?,
        })
    }
}

fn parse_num(tok: &str, what: &str) -> Result<u64, HarnessError> {
    tok.parse().map_err(|_| config_err(format!("bad {what} `{tok}`")))
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub graph: GraphSource,
    pub batches: BatchSource,
    /// Initial labelling file; generated from the batch seed when absent.
    pub labels: Option<PathBuf>,
    pub sim: SimConfig,
    pub oracle: bool,
    /// Neighbourhood radius of the `local1` scenario.
    pub radius: usize,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, graph: GraphSource, batches: BatchSource) -> Self {
        ExperimentConfig { scenario, graph, batches, labels: None, sim: SimConfig::default(), oracle: true, radius: 1 }
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<MetricsRow>,
    pub summary: Summary,
    /// Concatenated per-batch transcripts when the config asked for them.
    pub transcript: Option<String>,
    /// Oracle mismatch descriptions, one per failing batch.
    pub failures: Vec<String>,
}

impl ExperimentReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A loaded instance: graph, initial labelling and batch trace.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: CommGraph,
    pub initial: Labelling,
    pub batches: Vec<BatchUpdate>,
}

pub fn load_instance(config: &ExperimentConfig) -> Result<Instance, HarnessError> {
    let file = match &config.graph {
        GraphSource::File(p) => crate::graph::io::read_graph(p)?,
        GraphSource::Gen { kind, n, seed } => {
            let graph = gen::generate_graph(*kind, *n, *seed)?;
            GraphFile { ids: IdMap::identity(graph.n()), graph }
        }
    };
    let graph = file.graph.clone();
    if config.scenario.needs_clique() && !graph.is_complete() {
        return Err(HarnessError::NeedsClique(config.scenario));
    }
    let kind = config.scenario.label_kind();
    let domain = config.scenario.default_domain(graph.n());
    let label_seed = match &config.batches {
        BatchSource::Gen { seed, .. } => *seed,
        BatchSource::File(_) => 0,
    };
    let initial = match &config.labels {
        Some(p) => parse_labelling(&std::fs::read_to_string(p)?, &file, kind)?,
        None => gen::random_labelling(&graph, domain, label_seed),
    };
    let batches = match &config.batches {
        BatchSource::File(p) => parse_batches(&std::fs::read_to_string(p)?, &file.ids, kind)?,
        BatchSource::Gen { dist, alpha, count, seed } => {
            gen::generate_batches(&graph, &initial, *dist, *alpha, *count, domain, seed.wrapping_add(1))?
        }
    };
    Ok(Instance { graph, initial, batches })
}

/// Runs every batch of the configured trace in order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let inst = load_instance(config)?;
    run_instance(config, &inst)
}

/// Like [`run_experiment`] on an already loaded instance.
pub fn run_instance(config: &ExperimentConfig, inst: &Instance) -> Result<ExperimentReport, HarnessError> {
    if config.scenario.needs_clique() && !inst.graph.is_complete() {
        return Err(HarnessError::NeedsClique(config.scenario));
    }
    let graph = &inst.graph;
    let mut runner = scenario::Runner::new(config, graph, &inst.initial)?;
    let mut current = inst.initial.clone();
    let mut rows = Vec::with_capacity(inst.batches.len());
    let mut failures = Vec::new();
    let mut transcript = config.sim.transcript.then(String::new);
    for (i, batch) in inst.batches.iter().enumerate() {
        let (next, _) = apply_batch(&current, batch)?;
        let out = runner.step(graph, &current, &next, batch, i as u64, &config.sim)?;
        if let Some(t) = transcript.as_mut() {
            t.push_str(&format!("# batch {i}\n"));
            t.push_str(&format_transcript(&out.transcript));
        }
        let oracle_ok = config.oracle.then(|| out.mismatch.is_none());
        if let Some(m) = out.mismatch {
            failures.push(format!("batch {i}: {m}"));
        }
        rows.push(MetricsRow {
            batch_index: i,
            alpha: batch.alpha(),
            rounds: out.metrics.rounds,
            messages: out.metrics.messages_sent,
            words: out.metrics.words_sent,
            max_aux_bits: out.metrics.max_aux_bits,
            oracle_ok,
        });
        current = next;
    }
    let summary = Summary::of(config.scenario, graph, &rows);
    Ok(ExperimentReport { rows, summary, transcript, failures })
}
