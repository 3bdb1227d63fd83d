use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn magneflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magneflow"))
        .args(args)
        .current_dir(dir)
        .env("MAGNEFLOW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn build_then_verify_two_sphere() {
    let dir = TempDir::new().unwrap();
    let out = magneflow(&["build", "--n", "2", "--alpha", "1", "--out", "fam.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let fam = json(&dir.path().join("fam.json"));
    assert_eq!(fam["integrals"].as_array().unwrap().len(), 2);
    assert_eq!(fam["meta"]["config"]["alpha"], "1");
    assert_eq!(fam["meta"]["seed"], 0);

    let out = magneflow(&["verify", "--family", "fam.json", "--seed", "42", "--report", "rep.json"], dir.path());
    assert_eq!(code(&out), 0);
    let rep = json(&dir.path().join("rep.json"));
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["meta"]["seed"], 42);
    assert!(rep.get("wall_times").is_none());
}

#[test]
fn tampered_family_fails_verification() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&magneflow(&["build", "--n", "2", "--alpha", "1", "--out", "fam.json"], dir.path())), 0);
    let mut fam = json(&dir.path().join("fam.json"));
    // replace the linear member by X1 P1
    fam["integrals"][1]["poly"] = serde_json::json!({"n": 2, "terms": [{"c": "1", "e": [1, 0, 0, 1, 0, 0]}]});
    fs::write(dir.path().join("bad.json"), fam.to_string()).unwrap();
    let out = magneflow(&["verify", "--family", "bad.json", "--samples", "20", "--report", "rep.json"], dir.path());
    assert_eq!(code(&out), 1);
    let rep = json(&dir.path().join("rep.json"));
    assert_eq!(rep["pass"], false);
    assert!(rep["pair_results"].as_array().unwrap().iter().any(|p| p["status"] == "nonzero"));
}

#[test]
fn six_sphere_reports_extra_integrals() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&magneflow(&["build", "--n", "6", "--alpha", "1,1,1", "--out", "fam.json"], dir.path())), 0);
    let out = magneflow(&["verify", "--family", "fam.json", "--samples", "100", "--seed", "42", "--report", "rep.json"], dir.path());
    assert_eq!(code(&out), 0);
    let rep = json(&dir.path().join("rep.json"));
    assert!(!rep["probe_results"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    assert_eq!(code(&magneflow(&["verify", "--family", "junk.json", "--report", "r.json"], dir.path())), 2);
    assert_eq!(code(&magneflow(&["verify", "--family", "missing.json", "--report", "r.json"], dir.path())), 2);
    assert_eq!(code(&magneflow(&["build", "--n", "2", "--alpha", "0.5", "--out", "f.json"], dir.path())), 2);
    assert_eq!(code(&magneflow(&["build", "--n", "4", "--alpha", "1", "--out", "f.json"], dir.path())), 2);
    assert_eq!(code(&magneflow(&["build", "--n", "2", "--alpha", "-1", "--out", "f.json"], dir.path())), 2);
    assert_eq!(code(&magneflow(&["frobnicate"], dir.path())), 2);
}

#[test]
fn normal_form_examples() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"omega": [[0,1,0],[-1,0,0],[0,0,0]]}"#).unwrap();
    assert_eq!(code(&magneflow(&["normal-form", "--in", "c.json", "--out", "c.out.json"], dir.path())), 0);
    let nf = json(&dir.path().join("c.out.json"));
    assert_eq!(nf["alphas"][0], 1.0);
    assert_eq!(nf["Q"], serde_json::json!([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));

    fs::write(dir.path().join("z.json"), r#"{"omega": [[0,0,0],[0,0,0],[0,0,0]]}"#).unwrap();
    assert_eq!(code(&magneflow(&["normal-form", "--in", "z.json", "--out", "z.out.json"], dir.path())), 0);
    assert_eq!(json(&dir.path().join("z.out.json"))["alphas"][0], 0.0);

    fs::write(dir.path().join("s.json"), r#"{"omega": [[0,1],[1,0]]}"#).unwrap();
    assert_eq!(code(&magneflow(&["normal-form", "--in", "s.json", "--out", "s.out.json"], dir.path())), 2);
}

#[test]
fn simulate_writes_csv_and_drift() {
    let dir = TempDir::new().unwrap();
    let args = ["simulate", "--n", "2", "--alpha", "1", "--dt", "1e-3", "--steps", "10000", "--seed", "3", "--check-picture", "--out", "run"];
    let out = magneflow(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let drift = json(&dir.path().join("run.drift.json"));
    assert!(drift["drift"]["max_rel_drift"].as_f64().unwrap() <= 1e-6);
    assert!(drift["picture"]["kinetic_drift"].as_f64().unwrap() <= 1e-5);
    assert_eq!(drift["meta"]["config"]["dt"], 1e-3);
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,X1,X2,X3,P1,P2,P3,F1,F2,H,c1,c2");
    assert_eq!(csv.lines().count(), 10_002);

    // determinism
    let again = TempDir::new().unwrap();
    assert_eq!(code(&magneflow(&args, again.path())), 0);
    assert_eq!(csv, fs::read_to_string(again.path().join("run.csv")).unwrap());
    assert_eq!(
        fs::read(dir.path().join("run.drift.json")).unwrap(),
        fs::read(again.path().join("run.drift.json")).unwrap()
    );
}

#[test]
fn simulate_great_circle_from_file() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("init.json"), r#"{"x": [1, 0, 0], "p": [0, 1, 0]}"#).unwrap();
    let out = magneflow(
        &["simulate", "--n", "2", "--alpha", "0", "--dt", "1e-2", "--steps", "1000", "--init", "init.json", "--tol", "1e-10", "--out", "gc"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_rejects_oversized_step_and_bad_init() {
    let dir = TempDir::new().unwrap();
    let out = magneflow(&["simulate", "--n", "3", "--alpha", "1,2", "--dt", "0.5", "--steps", "2000", "--out", "big"], dir.path());
    assert_eq!(code(&out), 1);
    fs::write(dir.path().join("off.json"), r#"{"x": [2, 0, 0], "p": [0, 1, 0]}"#).unwrap();
    let out = magneflow(&["simulate", "--n", "2", "--alpha", "1", "--dt", "1e-3", "--steps", "10", "--init", "off.json", "--out", "o"], dir.path());
    assert_eq!(code(&out), 2);
}
