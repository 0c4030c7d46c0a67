use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hallcanon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallcanon")).args(args).env_remove("HALLCANON_CACHE").output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--out", "json"]);
    let out = hallcanon(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn all_pass(v: &Value) -> usize {
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["status"], "pass", "{c}");
    }
    checks.len()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hallcanon-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn a3_canonical_basis() {
    let v = json(&["canonical", "--family", "dynkin", "--quiver", "1->2,2->3", "--dim", "1,1,1"]);
    let res = v["results"].as_array().unwrap();
    assert_eq!(res.len(), 4);
    let top = res.iter().find(|r| r["index"] == "M(1,1,1)").unwrap();
    let terms: Vec<(String, Value)> = top["expansion"].as_array().unwrap().iter().map(|t| (t["class"].as_str().unwrap().to_string(), t["coeff"].clone())).collect();
    assert_eq!(terms.len(), 4);
    let coeff = |c: &str| terms.iter().find(|t| t.0 == c).unwrap().1.clone();
    assert_eq!(coeff("M(1,1,1)"), serde_json::json!([[0, "1", "1"]]));
    assert_eq!(coeff("M(0,1,1)+M(1,0,0)"), serde_json::json!([[-1, "1", "1"]]));
    assert_eq!(coeff("M(0,0,1)+M(0,1,0)+M(1,0,0)"), serde_json::json!([[-2, "1", "1"]]));
    all_pass(&v);
}

#[test]
fn cyclic_and_kronecker_canonical() {
    let v = json(&["canonical", "--family", "cyclic", "--n", "1", "--dim", "1,1"]);
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    all_pass(&v);
    let v = json(&["canonical", "--family", "kronecker", "--dim", "1,1"]);
    let idx: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["index"].as_str().unwrap()).collect();
    assert!(idx.contains(&"S_(1)"), "{idx:?}");
    assert_eq!(idx.len(), 2);
    all_pass(&v);
}

#[test]
fn kronecker_accepts_parallel_arrows_only() {
    let ok = hallcanon(&["canonical", "--family", "kronecker", "--quiver", "0->1,0->1", "--dim", "1,1"]);
    assert!(ok.status.success());
    let bad = hallcanon(&["canonical", "--family", "kronecker", "--quiver", "0->1", "--dim", "1,1"]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn hall_number_of_a2() {
    let v = json(&["hall", "--family", "dynkin", "--quiver", "1->2", "--quot", "S1", "--sub", "S2", "--total", "M11"]);
    let e = &v["results"][0]["expansion"][0];
    assert_eq!(e["coeff"], serde_json::json!([[0, "1", "1"]]));
    all_pass(&v);
    // the other extension order only gives the split module
    let v = json(&["hall", "--family", "dynkin", "--quiver", "1->2", "--quot", "S2", "--sub", "S1", "--total", "M10+M01"]);
    assert_eq!(v["results"][0]["expansion"][0]["coeff"], serde_json::json!([[0, "1", "1"]]));
    let out = hallcanon(&["hall", "--family", "dynkin", "--quiver", "1->2", "--quot", "S1", "--sub", "S2", "--total", "M20"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn hall_labels_by_printed_text() {
    let v = json(&["hall", "--family", "cyclic", "--n", "1", "--quot", "[1,1]", "--sub", "[0,1]", "--total", "[1,2]"]);
    all_pass(&v);
    let v = json(&["hall", "--family", "kronecker", "--quot", "I(0,1)", "--sub", "P(1,0)", "--total", "T1[1]"]);
    all_pass(&v);
}

#[test]
fn verify_kostka_and_serre() {
    let v = json(&["verify", "kostka", "--max-weight", "4", "--primes", "2,3,5"]);
    assert!(all_pass(&v) > 100);
    for fam in [&["--family", "kronecker"][..], &["--family", "cyclic", "--n", "2"], &["--family", "dynkin", "--quiver", "1->2,2->3"]] {
        let mut args = vec!["verify", "serre"];
        args.extend(fam);
        all_pass(&json(&args));
    }
}

#[test]
fn verify_other_identities() {
    for id in ["regular-sum", "perm-char", "specht-char"] {
        all_pass(&json(&["verify", id, "--max-weight", "3", "--primes", "2,3"]));
    }
    all_pass(&json(&["verify", "gram", "--family", "dynkin", "--quiver", "1->2,2->3", "--max-weight", "3"]));
}

#[test]
fn usage_and_resource_exit_codes() {
    assert_eq!(hallcanon(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(hallcanon(&["canonical", "--family", "dynkin", "--dim", "1"]).status.code(), Some(4));
    assert_eq!(hallcanon(&["canonical", "--family", "dynkin", "--quiver", "1->2", "--dim", "1"]).status.code(), Some(4));
    assert_eq!(hallcanon(&["canonical", "--family", "dynkin", "--quiver", "1->2", "--dim", "1,1", "--primes", "2,4"]).status.code(), Some(4));
    assert_eq!(hallcanon(&["canonical", "--family", "dynkin", "--quiver", "1->2,2->3,3->1", "--dim", "1,1,1"]).status.code(), Some(4));
    assert_eq!(hallcanon(&["verify", "wrong"]).status.code(), Some(4));
    let out = hallcanon(&["canonical", "--family", "dynkin", "--quiver", "1->2,2->3", "--dim", "2,2,2", "--budget-subspaces", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hallcanon(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_output_is_deterministic_and_cache_is_transparent() {
    let dir = scratch("cache");
    let d = dir.to_str().unwrap();
    let args = ["canonical", "--family", "kronecker", "--dim", "2,2", "--out", "json", "--cache-dir", d];
    let cold = hallcanon(&args);
    assert!(cold.status.success(), "{}", String::from_utf8_lossy(&cold.stderr));
    assert!(std::fs::read_dir(&dir).unwrap().next().is_some(), "cache directory stays empty");
    let warm = hallcanon(&args);
    assert_eq!(cold.stdout, warm.stdout);
    let none = hallcanon(&["canonical", "--family", "kronecker", "--dim", "2,2", "--out", "json"]);
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["meta"]["cache_dir"] = Value::Null;
        v
    };
    assert_eq!(strip(&cold), strip(&none));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn cache_dir_from_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_hallcanon"))
        .args(["canonical", "--family", "dynkin", "--quiver", "1->2,2->3", "--dim", "1,2,1"])
        .env("HALLCANON_CACHE", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.exists());
    let _ = std::fs::remove_dir_all(&dir);
}
