use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn svol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svol")).args(args).output().expect("svol runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = svol(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn documented_examples() {
    let out = svol(&["norm", "--ring", "Zmod:3^2", "--value", "6"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1/3");

    let dir = tempfile::tempdir().unwrap();
    let s2 = dir.path().join("s2.json");
    assert!(svol(&["generate", "surface", "--genus", "2", "--boundary", "0", "-o", path(&s2)]).status.success());
    let text = String::from_utf8(svol(&["minimize", "--model", path(&s2), "--ring", "triv:Fp:2"]).stdout).unwrap();
    assert!(text.lines().any(|l| l == "value: 6"), "{text}");

    let torus = dir.path().join("torus.json");
    assert!(svol(&["generate", "torus", "--out", path(&torus)]).status.success());
    let seq = json(&["scaling", "--model", path(&torus), "--p", "3", "--max-m", "4"]);
    let values: Vec<&str> = seq["terms"].as_array().unwrap().iter().map(|t| t["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["2"; 5]);
}

#[test]
fn exit_codes() {
    assert_eq!(svol(&["minimize", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(svol(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(svol(&["norm", "--ring", "Zp:4", "--value", "1"]).status.code(), Some(1));
    assert_eq!(svol(&["norm", "--ring", "Z", "--value", "1/0"]).status.code(), Some(1));
    assert_eq!(svol(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_inputs_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, "{\"dim\": 2,").unwrap();
    let out = svol(&["minimize", "--model", path(&bad), "--ring", "Z"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("broken.json") && err.contains("line"), "{err}");

    let facts = dir.path().join("facts.json");
    std::fs::write(&facts, r#"{"facts": [{"space": "M", "ring": "Qp:6", "hi": "1"}]}"#).unwrap();
    let out = svol(&["bounds", "--facts", path(&facts)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("facts.json") && err.contains("$.facts[0].ring"), "{err}");

    let missing = dir.path().join("absent.json");
    let err = String::from_utf8(svol(&["verify", "--model", path(&missing), "--ring", "Z"]).stderr).unwrap();
    assert!(err.contains("absent.json"), "{err}");
}

#[test]
fn json_output_is_stamped_sorted_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let ball = dir.path().join("ball.json");
    assert!(svol(&["generate", "ball", "-o", path(&ball)]).status.success());
    let args = ["--format", "json", "minimize", "--model", path(&ball), "--ring", "Zp:2"];
    let first = svol(&args).stdout;
    assert_eq!(first, svol(&args).stdout);
    let doc: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(doc["svol-schema"], 1);
    assert_eq!(doc["value"], "4");
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for cmd in [vec!["stable-surface", "--genus", "3", "--k-max", "4"], vec!["homology", "--model", path(&ball)]] {
        assert_eq!(json(&cmd)["svol-schema"], 1);
    }
}

#[test]
fn verify_homology_and_covers() {
    let dir = tempfile::tempdir().unwrap();
    let torus = dir.path().join("t.json");
    svol(&["generate", "torus", "-o", path(&torus)]);
    let v = json(&["verify", "--model", path(&torus), "--ring", "Fp:3"]);
    assert_eq!(v["fundamental"], true);
    assert_eq!(v["norm"], "2");
    let h = json(&["homology", "--model", path(&torus), "--ring", "Z"]);
    let ranks: Vec<u64> = h["degrees"].as_array().unwrap().iter().map(|d| d["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, [1, 2, 1]);
    let cover = json(&["generate", "cover", "--genus", "2", "--sheets", "3"]);
    assert_eq!(cover["sheets"], 3);
    assert_eq!(cover["total"]["label"], "Sigma_4");
    let c = json(&["certify-surface", "--model", path(&torus), "--genus", "1", "--boundary", "0"]);
    assert_eq!(c["derived_lower_bound"], 2);
}

#[test]
fn selftest_subset_reports_each_criterion() {
    let out = svol(&["selftest", "--only", "2,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{text}");
}
