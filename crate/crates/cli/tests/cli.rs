use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jumpfree(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumpfree"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixtures(dir: &Path) {
    let out = jumpfree(dir, &["fixtures", "--out", "fx"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn record_path(stdout: &[u8]) -> String {
    String::from_utf8_lossy(stdout)
        .lines()
        .find_map(|l| l.strip_prefix("record: "))
        .expect("record line")
        .to_string()
}

#[test]
fn label_committee_example() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let out = jumpfree(
        tmp.path(),
        &["label", "--config", "fx/committee-example.json", "--out", "runs"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = tmp.path().join(record_path(&out.stdout));
    let record: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(record["status"], "pass");
    let s_hat = &record["stages"].as_array().unwrap().iter().find(|s| s["name"] == "sHat").unwrap()["output"];
    let boss = s_hat["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e[0] == serde_json::json!([7, 11]))
        .unwrap();
    assert_eq!(boss[1], 3);
    assert!(path.with_file_name("label.timings.json").exists());
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let mut bytes = Vec::new();
    for out_dir in ["a", "b"] {
        let out = jumpfree(
            tmp.path(),
            &["solve", "--config", "fx/noisy-cube.json", "--out", out_dir, "--seed", "5"],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        bytes.push(std::fs::read(tmp.path().join(record_path(&out.stdout))).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn unknown_config_field_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let path = tmp.path().join("fx/noisy-cube.json");
    let mut config: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    config["surprise"] = Value::Bool(true);
    std::fs::write(&path, config.to_string()).unwrap();
    let out = jumpfree(tmp.path(), &["label", "--config", "fx/noisy-cube.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surprise"));
}

#[test]
fn missing_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(jumpfree(tmp.path(), &["search"]).status.code(), Some(2));
}

#[test]
fn tuple_budget_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let path = tmp.path().join("fx/committee-example.json");
    let mut config: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    config["budgets"]["tupleCap"] = 10.into();
    std::fs::write(&path, config.to_string()).unwrap();
    let out = jumpfree(tmp.path(), &["label", "--config", "fx/committee-example.json", "--out", "r"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn injected_fault_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let path = tmp.path().join("fx/quick-verify.json");
    let mut config: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    config["verify"]["injectFault"] = Value::Bool(true);
    std::fs::write(&path, config.to_string()).unwrap();
    let out = jumpfree(tmp.path(), &["verify", "--config", "fx/quick-verify.json", "--out", "r", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("committeeEquivalence") && l.contains("FAIL")));
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    let out = jumpfree(tmp.path(), &["verify", "--config", "fx/quick-verify.json", "--out", "r"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn solve_explicit_instances() {
    let tmp = tempfile::tempdir().unwrap();
    write_fixtures(tmp.path());
    std::fs::write(
        tmp.path().join("h.json"),
        r#"{"k": 2, "p": 4, "e0": 10, "delta0": [-7, -3], "delta1": [], "delta2": [3, 9, 50]}"#,
    )
    .unwrap();
    let out = jumpfree(
        tmp.path(),
        &["solve", "--config", "fx/noisy-cube.json", "--instances", "h.json", "--out", "r"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let record: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join(record_path(&out.stdout))).unwrap()).unwrap();
    let structured = &record["stages"].as_array().unwrap().iter().find(|s| s["name"] == "structured").unwrap()["output"];
    assert_eq!(structured["solvable"], true);

    // Five small positives exceed the allowance floor(2 log2 4) = 4.
    std::fs::write(
        tmp.path().join("bad.json"),
        r#"{"k": 2, "p": 4, "e0": 10, "delta0": [-7], "delta1": [], "delta2": [1, 2, 4, 5, 6]}"#,
    )
    .unwrap();
    let out = jumpfree(
        tmp.path(),
        &["solve", "--config", "fx/noisy-cube.json", "--instances", "bad.json", "--out", "r"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = jumpfree(tmp.path(), &["bench", "--out", "r"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let record = tmp.path().join(record_path(&out.stdout));
    let csv = std::fs::read_to_string(record.with_file_name("bench.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,comparisons,wallMillis"));
    let ps: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ps, ["4", "8", "16", "32"]);
}
