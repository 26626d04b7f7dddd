use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_meanfield-opt"));
    c.env_remove("MEANFIELD_OPT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// `(header, rows)` of a CSV file written by the tool.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn constants_matching() {
    let v: Value = serde_json::from_str(&stdout(&["constants", "--kernel", "matching"])).unwrap();
    let e = v["ground_state"].as_f64().unwrap();
    assert!((e - 0.822467).abs() < 1e-6, "{e}");
    assert!(v["consistency_residual"].as_f64().unwrap() <= 1e-5);
    assert_eq!(v["run"]["config"]["command"], "constants");
    assert!(v["run"]["timestamp"].is_u64());
}

#[test]
fn constants_tsp() {
    let v: Value = serde_json::from_str(&stdout(&["constants", "--kernel", "tsp", "--no-timestamp"])).unwrap();
    let e = v["ground_state"].as_f64().unwrap();
    assert!((e - 2.0415).abs() < 5e-4, "{e}");
    assert!((v["g0"].as_f64().unwrap() - 1.146).abs() < 1e-3);
    assert!(v["run"].get("timestamp").is_none());
}

#[test]
fn iterate_trace_respects_terminal_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    stdout(&["iterate", "--mode", "min", "--lambda", "3", "--k", "200", "--out", out]);
    let (header, rows) = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(header, ["k", "sup_gap", "terminal_gap", "expectation_gap", "bound"]);
    let last = rows.last().unwrap();
    assert!(last[2] <= 3.0 / 201.0);
    for r in &rows {
        assert!(r[2] <= 3.0 / (r[0] + 1.0));
    }
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["k"], 200);
    assert_eq!(manifest["files"].as_array().unwrap().len(), 4);
    assert!(dir.path().join("side_b.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "simulate",
        "--n",
        "10",
        "--replicas",
        "20",
        "--seed",
        "5",
        "--no-timestamp",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["popdyn", "--pop", "20000", "--k", "5", "--seed", "9", "--no-timestamp"];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let three = stdout(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(one, three);
    let other = stdout(&["popdyn", "--pop", "20000", "--k", "5", "--seed", "10", "--no-timestamp"]);
    assert_ne!(one, other);
}

#[test]
fn replay_reproduces_a_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = a.path().to_str().unwrap();
    let pb = b.path().to_str().unwrap();
    stdout(&[
        "finite-lambda",
        "--lambda",
        "2.5",
        "--grid",
        "50",
        "--out",
        pa,
        "--no-timestamp",
    ]);
    let manifest = a.path().join("run.json");
    stdout(&["replay", manifest.to_str().unwrap(), "--out", pb, "--no-timestamp"]);
    for name in ["run.json", "summary.json", "sweep.csv", "f.csv", "h.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn finite_lambda_tables() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&["finite-lambda", "--lambda", "3", "--out", dir.path().to_str().unwrap()]);
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!((summary["q"].as_f64().unwrap() - 0.17230932892866).abs() < 1e-12);
    let (header, rows) = read_csv(&dir.path().join("h.csv"));
    assert_eq!(header, ["x", "q", "h"]);
    assert_eq!(rows.len(), 201);
    let (_, sweep) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(sweep.len(), 30);
    assert_eq!(sweep.last().unwrap()[0], 3.0);
}

#[test]
fn csv_reals_carry_seventeen_digits() {
    let text = stdout(&["curve", "--kernel", "tsp", "--grid", "20", "--no-timestamp"]);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# run: {"));
    assert_eq!(lines.next().unwrap(), "x,G,W_residual");
    let field = lines.next().unwrap().split(',').nth(1).unwrap();
    let mantissa = field.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
}

#[test]
fn tsp_c_cross_check() {
    let text = stdout(&["tsp-c", "--lambda", "2,4", "--no-timestamp"]);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][1] > rows[1][1]);
    for r in &rows {
        assert!(r[1] > 2.0 && r[1] < 4.0);
        assert!(r[6].abs() < 1e-3);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["iterate", "--lambda", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["iterate", "--grid", "4"]).status.code(), Some(1));
    assert_eq!(
        run(&["simulate", "--n", "40", "--replicas", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["constants", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["constants", "--kernel", "potts"]).status.code(), Some(64));
    assert_eq!(run(&["replay", "/nonexistent/run.json"]).status.code(), Some(74));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("64 usage error"));
}

#[test]
fn thread_bound_from_environment() {
    let out = bin()
        .env("MEANFIELD_OPT_THREADS", "0")
        .args(["constants"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .env("MEANFIELD_OPT_THREADS", "2")
        .args(["simulate", "--n", "6", "--replicas", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
