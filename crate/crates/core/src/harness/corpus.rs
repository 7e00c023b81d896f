//! Instance families used to calibrate round budgets and to check them on
//! fresh seeds. A family is a function of a seed range, so calibration runs
//! on one range and checks run on a disjoint one.

use std::ops::Range;

use rand::seq::SliceRandom;

use super::gen::{AlphaDist, GenError, GraphKind};
use super::{BatchSource, ExperimentConfig, GraphSource, Scenario};
use crate::graph::{BatchUpdate, CommGraph, EdgeId, Label, Labelling};

fn cfg(scenario: Scenario, kind: GraphKind, n: usize, seed: u64, alpha: usize, count: usize) -> ExperimentConfig {
    ExperimentConfig::new(
        scenario,
        GraphSource::Gen { kind, n, seed },
        BatchSource::Gen { dist: AlphaDist::Fixed, alpha, count, seed },
    )
}

/// MST instances over random, torus and path-like graphs with
/// `α ∈ {1, 2, 4, 8, 16, 32}`; one short trace per seed.
pub fn mst_family(seeds: Range<u64>, count: usize) -> Vec<ExperimentConfig> {
    seeds
        .map(|s| {
            let alpha = 1 << (s % 6);
            let (kind, n) = match (s / 6) % 4 {
                0 => (GraphKind::RandomGnm { m: 0 }, 20 + 10 * (s as usize % 9)),
                1 => (GraphKind::Torus, [16, 25, 36, 49, 64][s as usize % 5]),
                2 => (GraphKind::RandomGnm { m: 0 }, 60 + 20 * (s as usize % 5)),
                _ => (GraphKind::Cycle, 12 + 4 * (s as usize % 8)),
            };
            cfg(Scenario::Mst, kind, n, s, alpha, count)
        })
        .collect()
}

/// Clique-enumeration instances on random graphs with `α` up to 64.
pub fn clique_family(seeds: Range<u64>, count: usize) -> Vec<ExperimentConfig> {
    seeds
        .map(|s| {
            let n = 16 + 8 * (s as usize % 6);
            let alpha = 1 << (s % 7);
            cfg(Scenario::Cliques, GraphKind::RandomGnm { m: 4 * n }, n, s, alpha, count)
        })
        .collect()
}

/// Dynamic matrix product instances on cliques, `n ≤ 32`, batches of up to
/// `2n` changed edges (`4n` matrix entries counting both factors).
pub fn matmul_family(seeds: Range<u64>, count: usize) -> Vec<ExperimentConfig> {
    seeds
        .map(|s| {
            let n = 4 + (s as usize * 7) % 29;
            let alpha = 1 + (s as usize * 13) % (n * (n - 1) / 2).min(n);
            let mut c = cfg(Scenario::CcMatmul, GraphKind::Clique, n, s, alpha, count);
            c.batches = BatchSource::Gen { dist: AlphaDist::Uniform, alpha, count, seed: s };
            c
        })
        .collect()
}

/// `α` changes packed as densely as possible: random pairs among the
/// smallest node prefix `0..k` with `k(k−1)/2 ≥ α`, each flipping its bit.
/// The changed-edge graph then has degeneracy about `√(2α)`, which is what
/// makes the clique algorithm pay `Θ(√α)` rounds.
pub fn dense_bit_batch(
    graph: &CommGraph,
    current: &Labelling,
    alpha: usize,
    seed: u64,
) -> Result<BatchUpdate, GenError> {
    let k = (2..=graph.n()).find(|k| k * (k - 1) / 2 >= alpha);
    let k = k.ok_or_else(|| GenError::InfeasibleParams(format!("no node prefix holds {alpha} pairs")))?;
    let mut pairs: Vec<EdgeId> =
        (0..k).flat_map(|a| (a + 1..k).map(move |b| EdgeId::of(a, b))).filter(|e| graph.contains(*e)).collect();
    if pairs.len() < alpha {
        return Err(GenError::InfeasibleParams(format!("prefix of {k} nodes has only {} edges", pairs.len())));
    }
    pairs.shuffle(&mut super::gen::rng(seed));
    let mut batch = BatchUpdate::new();
    for e in pairs.into_iter().take(alpha) {
        batch.push(e, Label::Bit(!current.is_set(e)))?;
    }
    Ok(batch)
}
