//! End-to-end runs of the command-line binary.

use std::process::Command;

fn runsec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_runsec"))
}

#[test]
fn fixture_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex1.json");
    let out = runsec()
        .args(["fixture", "EX1", "-o", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = runsec()
        .args(["check", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("checks matched"));
}

#[test]
fn wrong_expectation_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex1.json");
    runsec()
        .args(["fixture", "EX1", "-o", path.to_str().unwrap()])
        .output()
        .unwrap();
    let mangled = std::fs::read_to_string(&path)
        .unwrap()
        .replacen("\"holds\": true", "\"holds\": false", 1);
    std::fs::write(&path, mangled).unwrap();
    let out = runsec()
        .args(["check", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn eval_reports_probability_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex3.json");
    runsec()
        .args(["fixture", "EX3", "-o", path.to_str().unwrap()])
        .output()
        .unwrap();
    let out = runsec()
        .args([
            "eval",
            path.to_str().unwrap(),
            "--formula",
            "(pr 1 (once p) = 1/2)",
            "--at",
            "r3,0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "true");
}

#[test]
fn suites_run_and_mutations_fail() {
    let out = runsec()
        .args(["suite", "runbased-oracle", "--count", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());

    let out = runsec()
        .args([
            "suite",
            "exactness",
            "--count",
            "5",
            "--mutate",
            "tolerance",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("xor.json");
    runsec()
        .args(["fixture", "XOR", "1", "-o", path.to_str().unwrap()])
        .output()
        .unwrap();
    let out = runsec()
        .args(["check", path.to_str().unwrap(), "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("report is valid JSON");
    assert_eq!(parsed["all_match"], serde_json::Value::Bool(true));
}
