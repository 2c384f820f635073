use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sc_forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sc-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn encode_and_decode_print_streams_and_values() {
    let o = sc_forge(&["encode", "--value", "-0.5", "--len", "8", "--alpha", "1/4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1100 0000 @ 1/4");
    let o = sc_forge(&["decode", "11"]);
    assert_eq!(stdout(&o), "1");
    let o = sc_forge(&["decode", "00 @ 1/2"]);
    assert_eq!(stdout(&o), "-0.5");
}

#[test]
fn exit_codes() {
    assert_eq!(sc_forge(&["softmax", "--k", "3"]).status.code(), Some(2));
    assert_eq!(sc_forge(&["decode", "0110"]).status.code(), Some(2));
    let o = sc_forge(&[
        "softmax", "--m", "64", "--bx", "4", "--by", "8", "--s1", "7", "--s2", "8", "--k", "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s1"));
    let o = sc_forge(&["dse", "--grid", "/nonexistent/grid.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn dse_without_realizable_points_fails() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, r#"{"b_y": [8], "s1": [7], "s2": [1], "k": [2], "count": 2}"#).unwrap();
    let o = sc_forge(&["dse", "--grid", grid.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn softmax_trace_matches_hand_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    std::fs::write(&csv, "# one row\n1, 0\n").unwrap();
    let dist = format!("file:{}", csv.display());
    let out = dir.path().join("run");
    let o = sc_forge(&[
        "softmax", "--m", "2", "--k", "1", "--bx", "8", "--alpha-x", "1/4", "--by", "128",
        "--alpha-y", "1/64", "--s1", "1", "--s2", "1", "--count", "1", "--dist", &dist,
        "--trace", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = read_json(&out.join("softmax_trace.json"));
    let row = &trace["vectors"][0];
    assert_eq!(row["sc"], serde_json::json!([0.75, 0.25]));
    assert_eq!(row["iterative"], serde_json::json!([0.75, 0.25]));
    let e = 1f64.exp();
    assert!((row["exact"][0].as_f64().unwrap() - e / (e + 1.0)).abs() < 1e-15);
}

#[test]
fn gelu_run_writes_reports_and_netlist() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = sc_forge(&[
        "gelu", "--bsl-in", "8", "--bsl-out", "2", "--alpha-in", "1", "--samples", "200",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = read_json(&out.join("si_config.json"));
    assert_eq!(cfg["equations"], serde_json::json!(["y[1] = !x[5] | x[4]", "y[0] = x[3]"]));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "gelu");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config"]["alpha_out"], "1/5");
    let eval = read_json(&out.join("si_eval.json"));
    assert_eq!(eval["samples"], 200);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(
        &grid,
        r#"{"m": 16, "b_y": [4, 8], "s1": [1, 2, 4], "s2": [1, 2], "k": [1, 2], "count": 6, "y_range": "1/8"}"#,
    )
    .unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = Command::new(env!("CARGO_BIN_EXE_sc-forge"))
            .env("SC_FORGE_THREADS", threads)
            .args(["dse", "--grid", grid.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(out.join("dse_results.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with("# manifest_digest="));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 24);
}

#[test]
fn cost_profile_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("p.json");
    std::fs::write(&profile, r#"{"compare_exchange_gates": 3}"#).unwrap();
    let out = dir.path().join("c");
    let o = sc_forge(&[
        "cost", "bsn", "--bits", "4", "--cost-profile", profile.to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&out.join("cost.json"))["gate_count"], 18);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["profile"]["compare_exchange_gates"], 3);

    std::fs::write(&profile, r#"{"xor_gate": 1}"#).unwrap();
    let o = sc_forge(&["cost", "bsn", "--bits", "4", "--cost-profile", profile.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
