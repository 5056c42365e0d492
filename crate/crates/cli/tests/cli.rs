//! End-to-end runs of the `demazure` binary against the shared fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_demazure"))
        .args(args)
        .env_remove("DEMAZURE_ORDER")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

fn assert_schema(v: &Value) {
    assert!(v["check"].is_string());
    assert!(v["holds"].is_boolean());
    assert!(v.get("certified_order").is_some());
    assert!(v["details"].is_object());
}

#[test]
fn classify_types() {
    for (file, ty) in [("a1aff.json", "Aff"), ("a2.json", "Fin"), ("hyperbolic24.json", "Ind"), ("g2aff.json", "Aff")] {
        let (code, v) = json(&["classify", "--gcm", &fixture(file)]);
        assert_eq!(code, 0);
        assert_schema(&v);
        assert_eq!(v["details"]["type"], ty, "{file}");
    }
    let (_, v) = json(&["classify", "--gcm", &fixture("a1aff.json")]);
    assert_eq!(v["details"]["delta"], serde_json::json!([1, 1]));
}

#[test]
fn lattice_checks() {
    let (code, v) = json(&["lattice", "check", "--lattice", &fixture("lambda3.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["fdl1"], "pass");

    let (code, v) = json(&["lattice", "check", "--lattice", &fixture("rwl-counterexample.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    assert_eq!(v["details"]["fdl1"], "fail");
    assert_eq!(v["details"]["fdl2"], "pass");
}

#[test]
fn lattice_compare() {
    let (code, v) = json(&["lattice", "compare", "--a", &fixture("lambda1.json"), "--b", &fixture("lambda3.json")]);
    assert_eq!(code, 0);
    assert_schema(&v);
    assert_eq!(v["details"]["contains"], true);
    assert_eq!(v["details"]["contained_in_reverse"], false);
    assert_eq!(v["details"]["quotient_a"], serde_json::json!([4]));
    assert_eq!(v["details"]["quotient_b"], serde_json::json!([12]));
}

#[test]
fn verify_fgl_builtin_and_custom() {
    for law in ["hyperbolic", "additive", "multiplicative"] {
        let out = run(&["verify", "fgl", "--fgl", law, "--order", "6"]);
        assert!(out.status.success(), "{law}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("fgl: PASS"));
    }
    let custom = format!("custom:{}", fixture("custom-log.json"));
    let (code, v) = json(&["verify", "fgl", "--fgl", &custom]);
    assert_eq!(code, 0);
    assert!(v["details"]["checks"].as_array().unwrap().len() >= 2);
}

#[test]
fn verify_relations_small() {
    for file in ["a2.json", "a1xa1.json", "b2.json"] {
        let (code, v) = json(&["verify", "relations", "--gcm", &fixture(file), "--order", "6"]);
        assert_eq!(code, 0, "{file}: {v}");
        assert_schema(&v);
        let checks = v["details"]["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["holds"] == true));
        assert!(v["certified_order"].as_i64().unwrap() >= 1);
    }
}

#[test]
fn order_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_demazure"))
        .args(["--format", "json", "verify", "fgl", "--fgl", "additive"])
        .env("DEMAZURE_ORDER", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["details"]["checks"][0]["certified_order"], 5);
}

#[test]
fn hecke_checks() {
    let (code, v) = json(&["verify", "hecke-iso", "--gcm", &fixture("a1aff.json"), "--length", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["holds"], true);
    let (code, v) = json(&["verify", "affine-hecke", "--gcm", &fixture("a2.json")]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn bad_input_exits_two() {
    let missing = fixture("does-not-exist.json");
    for args in [
        vec!["verify", "relations", "--gcm", missing.as_str()],
        vec!["classify", "--gcm", missing.as_str()],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let a2 = fixture("a2.json");
    let out = run(&["verify", "hecke-iso", "--gcm", &a2, "--bind", "mu1=zz"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "hecke-iso", "--gcm", &a2, "--fgl", "additive"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_gcm_exits_two() {
    let dir = std::env::temp_dir().join(format!("demazure-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    // off-diagonal sign violation
    std::fs::write(&bad, "[[2, 1], [-1, 2]]").unwrap();
    let out = run(&["classify", "--gcm", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&bad, "not json").unwrap();
    let out = run(&["classify", "--gcm", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}
