//! End-to-end runs of the `mirage` binary.

use std::process::{Command, Output};

fn mirage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirage")).args(args).output().unwrap()
}

fn mirage_with_workers(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirage")).args(args).env("MIRAGE_WORKERS", workers).output().unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_owned()
}

#[test]
fn fig2b_dynamics_has_three_curves() {
    let out = mirage(&["dynamics", "--preset", "fig2b", "--t-max", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows[0][..3], ["case".to_string(), "j1".into(), "emitter".into()]);
    let j1s: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(j1s.len(), 3);
    // Starts excited.
    assert!((rows[1][6].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn quick_validation_passes() {
    let out = mirage(&["validate", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(csv_rows(&out)[1..].iter().all(|r| r[1] == "true"));
}

#[test]
fn mirage_interaction_families() {
    let out = mirage(&["interaction", "--sheet", "mirage", "--d", "0,1,3,10"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    let ds: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(ds, ["0", "1", "10", "3"].into_iter().collect());
}

#[test]
fn bad_config_exits_one_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"command": "dynamics", "bath": {"j1": -1.0}}"#).unwrap();
    let out = mirage(&["dynamics", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "config");

    let out = mirage(&["bs", "--preset", "fig2b"]);
    assert_eq!(out.status.code(), Some(1));
    let out = mirage(&["dynamics", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coarse.json");
    // A contour hugging the real axis aliases; the refinement check catches it.
    std::fs::write(
        &path,
        r#"{"command": "dynamics", "bath": {"j1": 0.9}, "emitters": [{"sublattice": "A", "omega": 0.1}],
            "contour": {"eta": 1e-9, "span": 10.0, "n_omega": 4096}, "times": {"start": 0, "stop": 10, "steps": 10}}"#,
    )
    .unwrap();
    let out = mirage(&["dynamics", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "numerical");
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["bs", "--preset", "fig9"];
    let a = mirage_with_workers(&args, "1");
    let b = mirage_with_workers(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn files_and_plots_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let json = dir.path().join("out.json");
    let out = mirage(&["spectrum", "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("case,variant,k,"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let out = mirage(&["phase", "--format", "json", "--out", json.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["columns"][2], "physical");
}
