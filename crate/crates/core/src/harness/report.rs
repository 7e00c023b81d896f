//! Metrics rows, fitted summaries and their CSV/JSON forms.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Scenario};
use crate::graph::CommGraph;

/// One row per batch. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub batch_index: usize,
    pub alpha: usize,
    pub rounds: usize,
    pub messages: u64,
    pub words: u64,
    pub max_aux_bits: u64,
    /// Empty when the oracle is off.
    pub oracle_ok: Option<bool>,
}

/// Least-squares coefficients and goodness of fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub coef: Vec<f64>,
    pub r2: f64,
}

impl LinearFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.coef.iter().zip(x).map(|(c, x)| c * x).sum()
    }
}

/// Solves the normal equations for `y ≈ X·β`. `None` if `XᵀX` is singular.
pub fn fit_linear(xs: &[Vec<f64>], ys: &[f64]) -> Option<LinearFit> {
    let k = xs.first()?.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (x, &y) in xs.iter().zip(ys) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += x[i] * x[j];
            }
            a[i][k] += x[i] * y;
        }
    }
    // Gauss-Jordan with partial pivoting
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let fit = LinearFit { coef, r2: 0.0 };
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - fit.predict(x)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LinearFit { r2, ..fit })
}

/// Exponent `b` of `y ≈ a·x^b` by regression in log-log space; points with
/// a non-positive coordinate are skipped.
pub fn fit_power(points: &[(f64, f64)]) -> Option<f64> {
    let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (vec![1.0, x.ln()], y.ln())).unzip();
    fit_linear(&xs, &ys).map(|f| f.coef[1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub n: usize,
    pub m: usize,
    pub diameter: usize,
    pub batches: usize,
    pub max_rounds: usize,
    pub mean_rounds: f64,
    pub max_aux_bits: u64,
    /// `rounds ≈ c0 + c1·α` over the rows.
    pub rounds_vs_alpha: Option<LinearFit>,
    /// Exponent of rounds against α, from batches with `α > 0`.
    pub alpha_exponent: Option<f64>,
    pub oracle_failures: usize,
}

impl Summary {
    pub fn of(scenario: Scenario, graph: &CommGraph, rows: &[MetricsRow]) -> Self {
        let rounds: Vec<f64> = rows.iter().map(|r| r.rounds as f64).collect();
        let xs: Vec<Vec<f64>> = rows.iter().map(|r| vec![1.0, r.alpha as f64]).collect();
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.alpha as f64, r.rounds as f64)).collect();
        Summary {
            scenario: scenario.name().to_string(),
            n: graph.n(),
            m: graph.m(),
            diameter: graph.diameter(),
            batches: rows.len(),
            max_rounds: rows.iter().map(|r| r.rounds).max().unwrap_or(0),
            mean_rounds: if rows.is_empty() { 0.0 } else { rounds.iter().sum::<f64>() / rows.len() as f64 },
            max_aux_bits: rows.iter().map(|r| r.max_aux_bits).max().unwrap_or(0),
            rounds_vs_alpha: fit_linear(&xs, &rounds),
            alpha_exponent: fit_power(&points),
            oracle_failures: rows.iter().filter(|r| r.oracle_ok == Some(false)).count(),
        }
    }

    /// `# key=value` lines, appended after the CSV rows.
    pub fn comment_lines(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# scenario={} n={} m={} diameter={}", self.scenario, self.n, self.m, self.diameter);
        let _ = writeln!(
            out,
            "# batches={} max_rounds={} mean_rounds={:.3} max_aux_bits={} oracle_failures={}",
            self.batches, self.max_rounds, self.mean_rounds, self.max_aux_bits, self.oracle_failures
        );
        if let Some(f) = &self.rounds_vs_alpha {
            let _ = writeln!(out, "# fit rounds = {:.4} + {:.4}*alpha (r2={:.4})", f.coef[0], f.coef[1], f.r2);
        }
        if let Some(b) = self.alpha_exponent {
            let _ = writeln!(out, "# fit rounds ~ alpha^{b:.4}");
        }
        out
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// Reads rows back, skipping summary comment lines.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>, HarnessError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow], summary: Option<&Summary>) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(metrics_csv(rows)?.as_bytes())?;
    if let Some(s) = summary {
        f.write_all(s.comment_lines().as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonMirror<'a> {
    rows: &'a [MetricsRow],
    summary: &'a Summary,
}

pub fn write_json(path: &Path, rows: &[MetricsRow], summary: &Summary) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(&JsonMirror { rows, summary })?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
