//! Drives every scenario through the experiment harness and prints the
//! per-scenario summary plus the first metrics rows as CSV.
//!
//!     cargo run --release --example experiment_harness

use batch_congest::harness::gen::{AlphaDist, GraphKind};
use batch_congest::harness::report::metrics_csv;
use batch_congest::harness::{run_experiment, BatchSource, ExperimentConfig, GraphSource, Scenario};

fn main() {
    for scenario in Scenario::ALL {
        let (kind, n) = if scenario.needs_clique() { (GraphKind::Clique, 24) } else { (GraphKind::Torus, 36) };
        let cfg = ExperimentConfig::new(
            scenario,
            GraphSource::Gen { kind, n, seed: 1 },
            BatchSource::Gen { dist: AlphaDist::Uniform, alpha: 12, count: 20, seed: 1 },
        );
        let rep = run_experiment(&cfg).unwrap();
        let s = &rep.summary;
        println!(
            "{:<19} D {:>2}  mean rounds {:>7.1}  max aux bits {:>6}  oracle {}",
            scenario.name(),
            s.diameter,
            s.mean_rounds,
            s.max_aux_bits,
            if rep.all_ok() { "ok" } else { "MISMATCH" },
        );
        if scenario == Scenario::Mst {
            let csv = metrics_csv(&rep.rows[..3]).unwrap();
            print!("{}", csv.lines().map(|l| format!("    {l}\n")).collect::<String>());
        }
    }
}
