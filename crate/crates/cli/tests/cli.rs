use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperfock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfock"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = hyperfock(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn values(v: &Value) -> Vec<f64> {
    v["table"]["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

const ZERO_PHASES: [&str; 8] = ["--phase-d", "0", "--phase-l", "0", "--phase-r", "0", "--phase-u", "0"];

#[test]
fn fermion_table_at_zero_phase() {
    let mut args = vec!["table", "li", "--stats", "fermion", "--kind", "path-path"];
    args.extend(ZERO_PHASES);
    let v = json(&args);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["experiment"], "li");
    let t = values(&v);
    assert!(close(t[0], 0.25) && close(t[1], 0.0) && close(t[2], 0.0) && close(t[3], 0.25));
    assert!(close(v["E"].as_f64().unwrap(), 1.0));
    assert!(v["metadata"]["sign_convention"].as_str().unwrap().contains("+1={L"));
}

#[test]
fn distinguishable_table_is_flat() {
    let mut args = vec!["table", "li", "--stats", "distinguishable", "--kind", "path-path"];
    args.extend(ZERO_PHASES);
    for p in values(&json(&args)) {
        assert!(close(p, 0.125));
    }
}

#[test]
fn swap_table_at_quarter_aggregate() {
    let v = json(&["table", "swap", "--phase-d", "pi/2", "--phase-l", "0", "--phase-r", "0", "--phase-u", "0"]);
    for p in values(&v) {
        assert!(close(p, 0.125));
    }
}

#[test]
fn chsh_records_four_correlations() {
    let v = json(&["chsh", "li", "--a0", "0", "--a1", "pi/2", "--b0", "pi/4", "--b1", "-pi/4"]);
    assert!(close(v["chsh"].as_f64().unwrap(), 2.0 * 2f64.sqrt()));
    assert_eq!(v["E"].as_array().unwrap().len(), 4);
    assert_eq!(v["result"]["witness"], "violation");
    let v = json(&["chsh", "li", "--stats", "distinguishable", "--a0", "0", "--a1", "pi", "--b0", "pi/4", "--b1", "-pi/4"]);
    assert!(close(v["chsh"].as_f64().unwrap(), 0.0));
    assert_eq!(v["result"]["witness"], "inconclusive");
}

#[test]
fn boson_chsh_at_grid_optimum() {
    let v = json(&["chsh", "li", "--stats", "boson", "--a0", "0", "--a1", "pi/2", "--b0", "pi/4", "--b1", "-pi/4"]);
    assert!(close(v["chsh"].as_f64().unwrap(), 2.0 * 2f64.sqrt()));
}

#[test]
fn signal_values() {
    let v = json(&["signal", "--dofs", "2"]);
    assert!((v["result"]["success"].as_f64().unwrap() - 0.75).abs() < 1e-15);
    let v = json(&["signal", "--dofs", "3"]);
    assert!((v["result"]["success"].as_f64().unwrap() - 0.875).abs() < 1e-15);
    let v = json(&["signal", "--copies", "4"]);
    assert!((v["result"]["success"].as_f64().unwrap() - 0.9375).abs() < 1e-15);
    assert_eq!(hyperfock(&["signal", "--dofs", "0"]).status.code(), Some(2));
}

#[test]
fn seeded_output_is_byte_identical() {
    let a = hyperfock(&["--json", "--seed", "11", "signal", "--copies", "2", "--mc", "20000"]);
    let b = hyperfock(&["--json", "--seed", "11", "signal", "--copies", "2", "--mc", "20000"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["metadata"]["seed"], 11);
}

#[test]
fn cascade_set_probabilities() {
    let v = json(&["cascade", "-n", "2", "--basis", "z"]);
    assert!(close(v["result"]["all_equal"].as_f64().unwrap(), 1.0));
    let v = json(&["cascade", "-n", "2", "--basis", "x"]);
    assert!(close(v["result"]["mixed"].as_f64().unwrap(), 0.5));
    let v = json(&["cascade", "-n", "3", "--basis", "x"]);
    assert!(close(v["result"]["all_equal"].as_f64().unwrap(), 0.25));
}

#[test]
fn check_reports_counts_and_errors() {
    let out = hyperfock(&["check", "swap"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("2 particles"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cdl");
    std::fs::write(&bad, "internal a\nexternal x\nstatistics boson\nparticle a y\n").unwrap();
    let out = hyperfock(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:12:"));

    let empty = dir.path().join("empty.cdl");
    std::fs::write(&empty, "").unwrap();
    let out = hyperfock(&["check", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing statistics declaration"));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn one_point_sweep_matches_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let out = hyperfock(&[
        "sweep", "li", "--kind", "spin-path", "--values", "0.3", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&path);
    assert_eq!(rows[0].join(","), "phiL,phiD,phiR,phiU,kind,p00,p01,p10,p11,E");
    assert_eq!(rows.len(), 2);
    let v = json(&[
        "table", "li", "--kind", "spin-path", "--phase-l", "0.3", "--phase-d", "0.3", "--phase-r", "0.3", "--phase-u",
        "0.3",
    ]);
    let cells: Vec<f64> = rows[1][5..9].iter().map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells, values(&v));
    assert_eq!(rows[1][9].parse::<f64>().unwrap(), v["E"].as_f64().unwrap());
}

#[test]
fn full_grid_sweep_rows_pass_quarter_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = hyperfock(&["sweep", "li", "--stats", "boson", "--grid", "9", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = read_csv(&path);
    assert_eq!(rows.len(), 1 + 9usize.pow(4));
    for row in &rows[1..] {
        let p: Vec<f64> = row[5..9].iter().map(|c| c.parse().unwrap()).collect();
        assert!((p[0] + p[1] - 0.25).abs() < 1e-9 && (p[2] + p[3] - 0.25).abs() < 1e-9);
    }
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let out = hyperfock(&["sweep", "li", "--grid", "0", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "phiL,phiD,phiR,phiU,kind,p00,p01,p10,p11,E\n");
}

#[test]
fn unwritable_output_exits_four() {
    let out = hyperfock(&["sweep", "li", "--grid", "1", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn source_files_run_through_table() {
    let v = json(&["table", "li_fermion", "--phase-d", "0.4", "--phase-r", "1.1"]);
    let w = json(&["table", "li", "--phase-d", "0.4", "--phase-r", "1.1"]);
    assert_eq!(values(&v), values(&w));
    assert_eq!(v["kind"], "path-path");
    assert_eq!(hyperfock(&["table", "li_fermion", "--stats", "boson"]).status.code(), Some(2));
    assert_eq!(hyperfock(&["table", "swap", "--stats", "fermion"]).status.code(), Some(2));
}

#[test]
fn bad_angle_is_an_input_error() {
    assert_eq!(hyperfock(&["table", "li", "--phase-d", "pie"]).status.code(), Some(2));
}
