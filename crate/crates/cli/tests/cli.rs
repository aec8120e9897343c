use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn permqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permqc"))
        .args(args)
        .env_remove("PERMQC_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn toffoli_at_eight() {
    let out = permqc(&["verify-toffoli", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["command"], "verify-toffoli");
    assert_eq!(v["passed"], true);
    let rep = &v["report"][0];
    assert_eq!(rep["timesteps"], 82);
    assert_eq!(rep["compare"]["divincenzo"], 85);
    assert_eq!(rep["compare"]["divincenzoAltCnot"], 73);
    assert!(rep["simulation"].is_null());
}

#[test]
fn theorem1_at_four() {
    let out = permqc(&["verify-theorem1", "--n", "4", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let dev = v["report"][0]["report"]["maxDeviation"].as_f64().unwrap();
    assert!(dev < 1e-12);
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn exhaustive_search_at_three() {
    let out = permqc(&["feasibility-search", "--M", "3", "--strategy", "exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["feasibleCount"], 0);
    assert_eq!(v["report"]["evaluated"], 72);
    assert!(v["report"].get("elapsedSeconds").is_none());
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["verify-theorem1", "--seed", "11", "--trials", "20"][..],
        &[
            "feasibility-search",
            "--M",
            "5",
            "--strategy",
            "random",
            "--budget",
            "50",
            "--seed",
            "3",
        ][..],
        &["verify-hadamard", "--n", "4"][..],
    ] {
        let a = permqc(args);
        let b = permqc(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn every_check_command_passes() {
    for cmd in [
        "verify-encoding",
        "verify-lemma",
        "verify-hadamard",
        "verify-cnot",
        "verify-perm-hadamard",
        "clifford-tables",
        "schedule-compare",
    ] {
        let out = permqc(&[cmd]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        assert_eq!(json(&out)["passed"], true, "{cmd}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_permqc"))
        .args(["verify-cnot"])
        .env("PERMQC_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v = read_json(&dir.path().join("verify-cnot.json"));
    assert_eq!(v["report"][0]["timesteps"], 2);

    let explicit = dir.path().join("nested/cmp.txt");
    let out = permqc(&[
        "schedule-compare",
        "--format",
        "text",
        "--output",
        explicit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&explicit).unwrap();
    assert!(text.starts_with("schedule-compare: PASS"));
    assert!(text.contains("82"));
}

#[test]
fn failed_check_exits_one_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.json");
    let out = permqc(&[
        "verify-theorem1",
        "--n",
        "2",
        "--tol",
        "0",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = read_json(&path);
    assert_eq!(v["passed"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["no-such-command"][..],
        &["feasibility-search"][..],
        &["feasibility-search", "--M", "3", "--strategy", "sideways"][..],
        &["feasibility-search", "--M", "7", "--strategy", "exhaustive"][..],
        &["feasibility-check", "--M", "4", "--perm-p", "(1,2,3,4)"][..],
        &[
            "feasibility-check",
            "--M",
            "4",
            "--perm-p",
            "(1,5)",
            "--perm-h",
            "(1,2)",
        ][..],
        &["verify-hadamard", "--n", "6"][..],
        &["verify-cnot", "--workers", "0"][..],
    ] {
        assert_eq!(permqc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn feasibility_check_reports_both_routes() {
    let out = permqc(&[
        "feasibility-check",
        "--M",
        "8",
        "--k",
        "3",
        "--perm-p",
        "(1,2,3,4,5,6,7,8)",
        "--perm-h",
        "(1,2)(3,7)(5,6)",
        "--z1",
        "1/8",
        "--z2",
        "1/2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let case = &v["report"]["cases"][0];
    assert_eq!(v["report"]["feasible"], true);
    assert_eq!(case["kernel"]["diagnostics"]["nullity"], 2);
    assert_eq!(case["rank"]["nullity"], 2);
    assert_eq!(case["kernel"]["solutions"][0]["reproducesGenerators"], true);

    let out = permqc(&[
        "feasibility-check",
        "--M",
        "4",
        "--k",
        "1",
        "--perm-p",
        "(1,2,3,4)",
        "--perm-h",
        "(1,2)",
    ]);
    let v = json(&out);
    assert_eq!(v["report"]["feasible"], false);
    assert_eq!(v["report"]["weights"][0]["orbitFilter"]["passed"], true);
    assert_eq!(v["report"]["cases"].as_array().unwrap().len(), 8);
}

#[test]
fn search_streams_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("c.jsonl");
    let cp = dir.path().join("c.checkpoint");
    let args = [
        "feasibility-search",
        "--M",
        "4",
        "--k",
        "1",
        "--jsonl",
        jsonl.to_str().unwrap(),
        "--checkpoint",
        cp.to_str().unwrap(),
        "--workers",
        "2",
    ];
    let first = permqc(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&jsonl).unwrap().lines().count(), 120);
    assert!(cp.exists());
    let again = permqc(&args);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(std::fs::read_to_string(&jsonl).unwrap().lines().count(), 120);

    let timed = permqc(&["feasibility-search", "--M", "3", "--timing", "--format", "text"]);
    let text = String::from_utf8(timed.stdout).unwrap();
    assert!(text.contains("elapsed seconds"));
}
