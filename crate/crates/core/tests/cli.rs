use std::path::Path;
use std::process::{Command, Output};

use clique_sim::graph::{connected_components, read_graph};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clique-sim"))
        .args(args)
        .output()
        .unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_a_readable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let out = cli(&[
        "gen",
        "--type",
        "components",
        "--n",
        "30",
        "--k",
        "3",
        "--p",
        "0.1",
        "--seed",
        "4",
        "--out",
        path_arg(&file),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let g = read_graph(&file).unwrap();
    assert_eq!(g.n(), 30);
    assert_eq!(connected_components(&g).component_count(), 3);
}

#[test]
fn gen_rejects_bad_parameters() {
    assert!(!cli(&["gen", "--type", "gnp", "--n", "1"]).status.success());
    assert!(!cli(&["gen", "--type", "gnp", "--n", "8", "--p", "2"]).status.success());
    assert!(!cli(&["gen", "--type", "hypercube", "--n", "8"]).status.success());
}

#[test]
fn run_emits_metrics_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let metrics = dir.path().join("m.json");
    let csv = dir.path().join("r.csv");
    assert!(cli(&[
        "gen",
        "--type",
        "weighted-clique",
        "--n",
        "16",
        "--seed",
        "2",
        "--out",
        path_arg(&graph)
    ])
    .status
    .success());
    let out = cli(&[
        "run",
        "--algo",
        "mst",
        "--graph",
        path_arg(&graph),
        "--seeds",
        "1,2,3",
        "--metrics-out",
        path_arg(&metrics),
        "--csv-out",
        path_arg(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 3);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert!(report["runs"][0]["ccmst_phases"].as_u64().is_some());
    assert!(report["runs"][0]["cluster_counts_by_phase"].is_array());
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("n,seed,algo,rounds_total,phase,rounds,messages,max_send,max_recv,pass\n"));
    assert!(rows
        .lines()
        .skip(1)
        .all(|l| l.starts_with("16,") && l.ends_with(",true")));
}

#[test]
fn run_with_generator_source_and_sweep() {
    let out = cli(&[
        "run",
        "--algo",
        "conn",
        "--graph",
        "gen:path,n=20",
        "--seeds",
        "0..2",
        "--route-cost",
        "1,4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    assert_eq!(runs[0]["route_cost"], 1);
    assert_eq!(runs[3]["route_cost"], 4);
    assert_eq!(
        runs[0]["metrics"]["messages_total"],
        runs[2]["metrics"]["messages_total"]
    );
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let args = [
        "run",
        "--algo",
        "conn",
        "--graph",
        "gen:gnp,n=40,p=0.1",
        "--seeds",
        "5,6",
    ];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
}

#[test]
fn violations_give_nonzero_exit() {
    // A tiny sampling constant leaves large cuts uncovered.
    let out = cli(&[
        "run",
        "--algo",
        "sample-verify",
        "--graph",
        "gen:gnp,n=16,p=0.9",
        "--c-sample",
        "0.001",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let clean = report["violations"].as_array().unwrap().is_empty();
    assert_eq!(out.status.code(), Some(if clean { 0 } else { 1 }));
    assert!(!clean, "tiny sampling constant should miss large cuts");
}

#[test]
fn verify_prints_a_report() {
    let out = cli(&[
        "verify",
        "--algo",
        "sample-verify",
        "--graph",
        "gen:gnp,n=16,p=0.8",
        "--seed",
        "3",
        "--c-sample",
        "0.5",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"cut_coverage_per_edge"));
    assert!(names.contains(&"cut_coverage_per_vertex"));
}

#[test]
fn missing_graph_file_is_an_error() {
    let out = cli(&["run", "--algo", "conn", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
}
