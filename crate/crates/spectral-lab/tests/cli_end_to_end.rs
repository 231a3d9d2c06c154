//! End-to-end tests of the binary: exit codes, output determinism, JSON
//! schemas and the seed environment override.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-lab"))
}

fn write_fixture(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("spectral-lab-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("SPECTRAL_LAB_SEED").output().unwrap()
}

#[test]
fn sigma_of_zero_matrix() {
    let path = write_fixture(
        "zero3.json",
        r#"{"n":3,"re":[[0,0,0],[0,0,0],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#,
    );
    let out = run(&["sigma", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["re"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(v["im"], serde_json::json!([0.0, 0.0, 0.0]));
}

#[test]
fn bharali_of_worked_example_pair() {
    let a = write_fixture(
        "ex1_a.json",
        r#"{"n":3,"re":[[0,0,0],[0,0,1],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#,
    );
    let s = 3f64.sqrt() / 2.0 * 0.1;
    let b = write_fixture(
        "ex1_b.json",
        &format!(
            r#"{{"n":3,"re":[[0.1,0,0],[0,-0.05,0],[0,0,-0.05]],"im":[[0,0,0],[0,{s},0],[0,0,{ms}]]}}"#,
            s = s,
            ms = -s
        ),
    );
    let out = run(&["bharali", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.01).abs() < 1e-10);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["example51", "--eps", "0.1", "--restarts", "3"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    // Conclusive certificate: 0.
    let ok = run(&["example51", "--eps", "0.1", "--restarts", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    // Unreachable margin: inconclusive, 2.
    let inconclusive = run(&[
        "discont",
        "--m",
        "2",
        "--delta",
        "0.01",
        "--margin",
        "0.9",
        "--restarts",
        "3",
    ]);
    assert_eq!(inconclusive.status.code(), Some(2));
    // Unreadable input: 1.
    let io = run(&["sigma", "/nonexistent/matrix.json"]);
    assert_eq!(io.status.code(), Some(1));
    // Unknown flag: 64.
    let usage = run(&["sigma", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(64));
}

#[test]
fn env_seed_overrides_flag() {
    let with_flag = bin()
        .args(["ball-radius", "--n", "2", "--directions", "256", "--seed", "7"])
        .env_remove("SPECTRAL_LAB_SEED")
        .output()
        .unwrap();
    let with_env = bin()
        .args(["ball-radius", "--n", "2", "--directions", "256", "--seed", "42"])
        .env("SPECTRAL_LAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
    let v: serde_json::Value = serde_json::from_slice(&with_flag.stdout).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn table_output_is_plain_text() {
    let out = run(&["detcheck", "--m", "3", "--j", "2", "--delta", "0.01", "--output", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max_residual"));
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}

#[test]
fn detcheck_reports_residual_and_sign() {
    let out = run(&["detcheck", "--m", "4", "--j", "2,3", "--delta", "0.001"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-13);
    let sign = v["observed_sign"].as_f64().unwrap();
    assert!(sign == 1.0 || sign == -1.0);
}

#[test]
fn cara3_and_disc_search_wire_formats() {
    let s = write_fixture("origin3.json", r#"{"n":3,"re":[0,0,0],"im":[0,0,0]}"#);
    let t = write_fixture("t3.json", r#"{"n":3,"re":[0.6,0.12,0.008],"im":[0,0,0]}"#);
    let out = run(&["cara3", s.to_str().unwrap(), t.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.2).abs() < 1e-6);

    let out = run(&[
        "disc-search",
        s.to_str().unwrap(),
        t.to_str().unwrap(),
        "--restarts",
        "3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["alpha"].as_f64().unwrap() <= 0.205);
    assert_eq!(v["disc"]["n"], 3);
}

#[test]
fn green_chain_runs_from_files() {
    let a = write_fixture(
        "witness_a.json",
        r#"{"n":3,"re":[[0,0,0.027],[1,0,0],[0,1,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#,
    );
    let out = run(&[
        "green-chain",
        a.to_str().unwrap(),
        "--mu",
        "0",
        "--alpha",
        "0.1",
        "--restarts",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["conclusion"], true);
    assert!(v["gap"].as_f64().unwrap() > 0.2);
}
