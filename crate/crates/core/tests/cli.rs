use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use batch_congest::harness::report::parse_metrics_csv;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().expect("binary runs")
}

fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn four_cycle_trace_passes_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_path(dir.path(), "m.csv");
    let out = simulate(&[
        "--scenario",
        "mst",
        "--graph",
        &data("four_cycle.graph"),
        "--labels",
        &data("four_cycle.labels"),
        "--batches",
        &data("four_cycle.batches"),
        "--metrics",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = parse_metrics_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.alpha == 1 && r.oracle_ok == Some(true)));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let csv = out_path(dir.path(), &format!("{tag}.csv"));
        let tr = out_path(dir.path(), &format!("{tag}.txt"));
        let json = out_path(dir.path(), &format!("{tag}.json"));
        let out = simulate(&[
            "--scenario",
            "cliques",
            "--gen",
            "random-gnm,30,4,70",
            "--gen-batches",
            "uniform,6,10,4",
            "--metrics",
            csv.to_str().unwrap(),
            "--transcript",
            tr.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
            "--summary",
        ]);
        assert!(out.status.success());
        (std::fs::read(csv).unwrap(), std::fs::read(tr).unwrap(), std::fs::read(json).unwrap())
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    let text = String::from_utf8(a.0).unwrap();
    assert!(text.contains("# fit rounds"));
    assert_eq!(parse_metrics_csv(&text).unwrap().len(), 10);
}

#[test]
fn oracle_off_leaves_column_empty() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_path(dir.path(), "m.csv");
    let out = simulate(&[
        "--scenario",
        "cc-triangles",
        "--gen",
        "clique,10,1",
        "--gen-batches",
        "fixed,5,3,2",
        "--oracle",
        "off",
        "--bandwidth",
        "strict",
        "--metrics",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = parse_metrics_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.alpha == 5 && r.oracle_ok.is_none()));
}

#[test]
fn clique_scenarios_reject_other_topologies() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_path(dir.path(), "m.csv");
    let out = simulate(&[
        "--scenario",
        "cc-matmul",
        "--gen",
        "grid,12,0",
        "--gen-batches",
        "fixed,1,1,0",
        "--metrics",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complete"));
}

#[test]
fn bad_arguments_are_reported() {
    let out = simulate(&["--scenario", "nope", "--gen", "path,5,0", "--gen-batches", "fixed,1,1,0", "--metrics", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    let out = simulate(&["--scenario", "mst", "--gen", "path,5", "--gen-batches", "fixed,1,1,0", "--metrics", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    // missing batch source is a usage error from the parser
    let out = simulate(&["--scenario", "mst", "--gen", "path,5,0", "--metrics", "/dev/null"]);
    assert!(!out.status.success());
}
