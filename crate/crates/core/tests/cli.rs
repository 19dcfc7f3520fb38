use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chainxfer::sweep::{manifest_path, read_csv, RunManifest, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainxfer")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&["sweep", "--schemes", "swap,cluster", "--p-grid", "0,0.1", "--q-grid", "0:0.1:3", "--oracle-overlay", "-o", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let records = read_csv(text.as_bytes()).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3);
    assert!(records.iter().all(|r| r.oracle_diff.unwrap() < 1e-10));
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(manifest_path(&csv)).unwrap()).unwrap();
    assert_eq!(manifest.record_count, records.len());
}

#[test]
fn repeated_sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let go = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut args = vec!["sweep", "--mode", "shots:200", "--seed", "9", "--p-grid", "0.05", "--q-grid", "0,0.1", "-o"];
        args.push(path.to_str().unwrap());
        args.extend_from_slice(extra);
        assert_eq!(code(&run(&args)), 0);
        fs::read(&path).unwrap()
    };
    let a = go("a.csv", &[]);
    assert_eq!(a, go("b.csv", &[]));
    assert_eq!(a, go("c.csv", &["--serial"]));
}

#[test]
fn config_file_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    fs::write(&json, r#"{"schemes": ["teleport"], "n_list": [3], "p_grid": [0.1], "q_grid": [0.2]}"#).unwrap();
    let kv = dir.path().join("c.conf");
    fs::write(&kv, "# same run\nschemes = teleport\nn-list = 3\np-grid = 0.1\nq-grid = 0.2\n").unwrap();
    let a = run(&["sweep", "--config", json.to_str().unwrap()]);
    let b = run(&["sweep", "--config", kv.to_str().unwrap()]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&b), 0, "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"no_such_field": 1}"#).unwrap();
    assert_eq!(code(&run(&["sweep", "--config", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["sweep", "--p-grid", "1.5"])), 2);
    assert_eq!(code(&run(&["sweep", "--schemes", "teleport", "--n", "4"])), 2);
    assert_eq!(code(&run(&["sweep", "--mode", "shots:10", "--hellinger"])), 2);
    assert_eq!(code(&run(&["mitigate", "--unmitigated", "0.9", "--points", "1:0.9,2:0.85"])), 2);
    assert_eq!(code(&run(&["mitigate", "--n", "4", "--schemes", "swap", "--contour-knots", "11", "--unmitigated", "0.9", "--points", "1:0.9,2:0.85,3:0.8"])), 0);
    assert_eq!(code(&run(&["zne", "--mode", "shots:10"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn check_passes() {
    let o = run(&["check", "--grid", "3"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.lines().all(|l| l.is_empty() || l.starts_with("PASS")), "{out}");
}

#[test]
fn oracle_and_mitigate_subcommands() {
    let o = run(&["oracle", "--schemes", "swap", "--p-grid", "0.1", "--q-grid", "0.05"]);
    assert_eq!(code(&o), 0);
    let rec = read_csv(o.stdout.as_slice()).unwrap();
    assert!((rec[0].success_recorded - 0.613895701867).abs() < 1e-9);

    let o = run(&["mitigate", "--schemes", "swap", "--unmitigated", "0.99952", "--points", "1:0.99952,1.5:0.9993,2:0.9991,2.5:0.9989,3:0.9987"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("1.00000"));
}

#[test]
fn dump_circuit_prints_folded_text() {
    let o = run(&["zne", "--schemes", "cluster", "--alphas", "1,3", "--dump-circuit"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("scheme cluster"));
    assert!(Path::new(env!("CARGO_BIN_EXE_chainxfer")).exists());
}
