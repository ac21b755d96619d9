use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn kgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(spec: &str, command: &str, extra: &[&str]) -> (i32, Value) {
    let path = fixture(spec);
    let mut args = vec!["--spec", path.to_str().unwrap(), "--command", command];
    args.extend_from_slice(extra);
    let out = kgraph(&args);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), report)
}

fn close(v: &Value, x: f64, tol: f64) -> bool {
    v.as_f64().is_some_and(|y| (x - y).abs() <= tol)
}

#[test]
fn spectral_golden_ratio() {
    let (code, r) = run("g2.json", "spectral", &[]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "pass");
    let p = &r["results"]["perron"];
    assert!(close(&p["t"][0], 1.6180339887, 1e-10), "{p}");
    for v in ["a", "b"] {
        assert!(close(&p[v][0], 0.850651, 1e-6), "{p}");
        assert!(close(&p[v][1], 0.525731, 1e-6), "{p}");
    }
}

#[test]
fn digraph_import_matches_json() {
    let path = fixture("golden.digraph");
    let out = kgraph(&["--spec", path.to_str().unwrap(), "--digraph", "--command", "spectral"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (_, json) = run("g2.json", "spectral", &[]);
    assert_eq!(r["results"]["perron"]["t"], json["results"]["perron"]["t"]);
}

#[test]
fn malformed_skeleton_is_a_violation() {
    let (code, r) = run("malformed.json", "validate", &[]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "violation");
    assert_eq!(r["results"]["valid"], false);
    let kinds: Vec<&str> = r["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["kind"].as_str().unwrap())
        .collect();
    assert!(!kinds.is_empty());

    let (code, r) = run("not_total.json", "validate", &[]);
    assert_eq!(code, 1);
    assert!(
        r["violations"]
            .as_array()
            .unwrap()
            .iter()
            .any(|v| v["kind"] == "not_total"),
        "{r}"
    );
}

#[test]
fn valid_skeletons_validate() {
    for g in ["g1.json", "g2.json", "g3.json", "g4.json"] {
        let (code, r) = run(g, "validate", &[]);
        assert_eq!(code, 0, "{g}: {r}");
        assert_eq!(r["results"]["valid"], true);
    }
}

#[test]
fn input_errors_exit_two() {
    let (code, r) = run("does_not_exist.json", "validate", &[]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "input_error");

    let (code, r) = run("g1.json", "dynamics", &["--radius", "0"]);
    assert_eq!(code, 2);
    assert_eq!(r["violations"][0]["kind"], "invalid_parameter");

    let (code, _) = run("g3.json", "enumerate", &["--degree", "1,2,3"]);
    assert_eq!(code, 2);

    let out = kgraph(&["--spec", fixture("g1.json").to_str().unwrap(), "--command", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_reach_the_report() {
    let (code, r) = run(
        "g1.json",
        "dynamics",
        &["--radius", "3", "--metric-r", "0.25", "--seed", "9"],
    );
    assert_eq!(code, 0, "{r}");
    let cfg = &r["inputs"]["config"];
    assert_eq!(cfg["radius"], 3);
    assert_eq!(cfg["seed"], 9);
    assert!(close(&cfg["metric_r"], 0.25, 0.0));
    assert!(r["inputs"]["digest"].as_str().is_some_and(|d| d.len() == 64));
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("kgraph-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("report.json");
    let spec = fixture("g2.json");
    let written = kgraph(&[
        "--spec",
        spec.to_str().unwrap(),
        "--command",
        "measure",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(written.status.code(), Some(0));
    let printed = kgraph(&["--spec", spec.to_str().unwrap(), "--command", "measure"]);
    assert_eq!(std::fs::read(&target).unwrap(), printed.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_deterministic_without_timing() {
    for command in ["enumerate", "spectral", "measure", "dynamics", "relations"] {
        let (_, a) = run("g4.json", command, &[]);
        let (_, b) = run("g4.json", command, &[]);
        assert_eq!(a, b, "{command}");
        assert!(a.get("timing").is_none());
    }
    let (_, timed) = run("g4.json", "spectral", &["--timing"]);
    assert!(timed["timing"]["elapsed_ms"].is_number());
}

#[test]
fn floats_keep_twelve_digits() {
    let out = kgraph(&["--spec", fixture("g2.json").to_str().unwrap(), "--command", "spectral"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.61803398875"), "{text}");
    assert!(!text.contains("1.618033988749"));
}
