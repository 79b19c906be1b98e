use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn spec(name: &str) -> String {
    root().join("specs").join(name).display().to_string()
}

fn jetchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetchar"))
        .args(args)
        .env_remove("JETCHAR_TRUNC_DEFAULT")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = jetchar(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn dims(v: &serde_json::Value) -> Vec<u64> {
    v["orders"].as_array().unwrap().iter().map(|r| r["dim_x"].as_u64().unwrap()).collect()
}

#[test]
fn analyze_ga() {
    let v = json(&["analyze", "ga", "--max-order", "3", "--json", "-"]);
    assert_eq!(dims(&v), vec![1, 2, 3, 4]);
    assert_eq!((v["m_l"].as_u64(), v["m_u"].as_u64()), (Some(0), Some(0)));
    assert_eq!(v["kernel"]["degenerate"], true);
}

#[test]
fn analyze_gm() {
    let v = json(&["analyze", "gm", "--max-order", "3", "--trunc", "8", "--json", "-"]);
    assert_eq!(dims(&v), vec![0, 1, 2, 3]);
    assert_eq!(v["kernel"]["m"], 1);
    assert_eq!(v["kernel"]["levels"][0]["dim_k"], 1);
}

#[test]
fn analyze_legendre() {
    let v = json(&["analyze", "legendre", "--lambda", "t", "--max-order", "3", "--trunc", "6", "--json", "-"]);
    assert_eq!(dims(&v), vec![0, 0, 1, 2]);
    assert_eq!(v["kernel"]["m"], 2);
    assert_eq!(v["kernel"]["levels"][0]["dim_k"], 2);
    assert_eq!(v["kernel"]["dim_l"], 1);
    assert_eq!(v["group"]["lambda"], "t");
    assert_eq!(v["stability"]["compared_with"], 8);
}

#[test]
fn spec_files_reproduce_catalog_reports() {
    for (name, file) in [("ga", "ga.toml"), ("gm", "gm.toml"), ("ga*gm", "ga_gm.toml")] {
        let a = jetchar(&["analyze", name, "--max-order", "3", "--json", "-"]);
        let b = jetchar(&["analyze", "--spec", &spec(file), "--max-order", "3", "--json", "-"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{}", name);
    }
}

#[test]
fn reports_are_byte_identical() {
    let a = jetchar(&["analyze", "ga*gm", "--max-order", "2", "--json", "-"]);
    let b = jetchar(&["analyze", "ga*gm", "--max-order", "2", "--json", "-"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn parse_error_points_at_the_token() {
    let out = jetchar(&["analyze", "--spec", &data("bad_token.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad_token.toml:4:16:"), "{err}");
    assert!(err.contains("'*'"), "{err}");
}

#[test]
fn axiom_failure_is_named() {
    let out = jetchar(&["analyze", "--spec", &data("bad_identity.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("identity axiom"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(jetchar(&["analyze", "nope"]).status.code(), Some(2));
    assert_eq!(jetchar(&["analyze", "legendre", "--lambda", "0"]).status.code(), Some(2));
    assert_eq!(jetchar(&["analyze", "legendre", "--lambda", "t +"]).status.code(), Some(2));
    assert_eq!(jetchar(&["analyze"]).status.code(), Some(2));
    assert_eq!(jetchar(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(jetchar(&["analyze", "--spec", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn invariant_violations_exit_1() {
    let out = jetchar(&["analyze", "--spec", &data("gm_without_units.toml"), "--max-order", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("primitive-count"));
}

#[test]
fn trunc_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_jetchar"))
        .args(["analyze", "gm", "--max-order", "2", "--json", "-"])
        .env("JETCHAR_TRUNC_DEFAULT", "6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["group"]["trunc"], 6);
    let out = Command::new(env!("CARGO_BIN_EXE_jetchar"))
        .args(["analyze", "gm", "--max-order", "2", "--trunc", "7", "--json", "-"])
        .env("JETCHAR_TRUNC_DEFAULT", "6")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["group"]["trunc"], 7);
}

#[test]
fn verify_field_suite() {
    let out = jetchar(&["verify", "--suite", "field", "--seed", "7", "--cases", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failures"));
}

#[test]
fn verify_replays_a_single_case() {
    let out = jetchar(&["verify", "--property", "deltaT-split", "--case-seed", "12345"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(jetchar(&["verify", "--property", "nope", "--case-seed", "1"]).status.code(), Some(2));
}

#[test]
fn oracle_jets_on_the_legendre_curve() {
    let out = jetchar(&["oracle", "jets", "--spec", &spec("legendre_curve.toml"), "--trials", "12", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<serde_json::Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 24);
    assert!(lines.iter().all(|r| r["pass"] == true));
    assert!(lines.iter().all(|r| r["verdict"] == (r["kind"] == "valid")));
}

#[test]
fn groups_list() {
    let out = jetchar(&["groups", "list"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ga") && text.contains("gm") && text.contains("legendre"));
}
