//! The `ccc4` binary: outputs, determinism and exit codes.

use std::fs;
use std::process::{Command, Output};

use ccc4_core::solver::SolveRecord;

fn ccc4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccc4")).args(args).env_remove("CCC4_JOBS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_equal_masses() {
    let o = ccc4(&["solve", "--masses", "1,1,1,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rec: SolveRecord = serde_json::from_str(&stdout(&o)).unwrap();
    let s = std::f64::consts::SQRT_2;
    let sq = [1.0, s, 1.0, 1.0, s, 1.0];
    for k in 0..6 {
        assert!((rec.r_star.as_array()[k] - sq[k]).abs() <= 1e-8);
    }
    assert!(rec.is_cocircular);
}

#[test]
fn solve_rejects_bad_masses() {
    let o = ccc4(&["solve", "--masses", "1,1,1,-1"]);
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("masses must be positive"));
    assert_eq!(code(&ccc4(&["solve", "--masses", "1,1,1"])), 64);
    assert_eq!(code(&ccc4(&["solve", "--masses", "1,1,1,1", "--starts", "x"])), 64);
    assert_eq!(code(&ccc4(&["solve", "--masses", "1,1,1,1", "--tol", "-1"])), 64);
}

#[test]
fn solve_is_deterministic() {
    let args = ["solve", "--masses", "2,2,1,1", "--starts", "50", "--seed", "7"];
    let a = ccc4(&args);
    let b = ccc4(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_writes_file_or_exits_73() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    let o = ccc4(&["solve", "--masses", "3,1,2,1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let rec: SolveRecord = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rec.converged);
    let bad = dir.path().join("missing").join("rec.json");
    assert_eq!(code(&ccc4(&["solve", "--masses", "1,1,1,1", "--out", bad.to_str().unwrap()])), 73);
}

#[test]
fn scan_smoke_grid() {
    let o = ccc4(&["scan", "--grid", "2", "--jobs", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# ccc4-schema=1");
    assert_eq!(lines[1], "m1,m2,m3,m4,K_star,U_star,lambda,is_cocircular,iterations,converged");
    assert_eq!(lines.len(), 10);
    for l in &lines[2..] {
        assert!(l.ends_with(",true"), "{l}");
    }
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), 1.0);
    assert!(first[4].parse::<f64>().unwrap().abs() <= 1e-10);
}

#[test]
fn scan_job_count_does_not_change_output() {
    let a = ccc4(&["scan", "--grid", "3", "--jobs", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_ccc4")).args(["scan", "--grid", "3"]).env("CCC4_JOBS", "4").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scan_fix_and_errors() {
    let o = ccc4(&["scan", "--grid", "2", "--fix", "m1=2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&ccc4(&["scan", "--grid", "1"])), 64);
    assert_eq!(code(&ccc4(&["scan", "--grid", "2", "--fix", "m7=1"])), 64);
    assert_eq!(code(&ccc4(&["scan", "--grid", "2", "--out", "/nonexistent-dir/x.csv"])), 73);
}

#[test]
fn inverse_cases() {
    let o = ccc4(&["inverse", "--angles", "0,90,180,270", "--degrees"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for k in ["m1", "m2", "m3", "m4"] {
        assert!((v["masses"][k].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    }

    let o = ccc4(&["inverse", "--angles", "0,50,180,300", "--degrees"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("infeasible: "));

    assert_eq!(code(&ccc4(&["inverse", "--angles", "0,0,90,180", "--degrees"])), 64);
    assert_eq!(code(&ccc4(&["inverse", "--angles", "0,1,2"])), 64);
    assert_eq!(code(&ccc4(&["inverse", "--angles", "-1,1,2,3"])), 64);
    assert_eq!(code(&ccc4(&["inverse"])), 64);
}

#[test]
fn inverse_reads_shape_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shape.json");
    let h = std::f64::consts::FRAC_PI_2;
    fs::write(&path, format!("{{\"theta\": [0, {h}, {}, {}], \"radius\": 2.5}}", 2.0 * h, 3.0 * h)).unwrap();
    let o = ccc4(&["inverse", "--shape", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    fs::write(&path, "{\"theta\": [0, 1]}").unwrap();
    assert_eq!(code(&ccc4(&["inverse", "--shape", path.to_str().unwrap()])), 64);
    assert_eq!(code(&ccc4(&["inverse", "--shape", "/nonexistent.json"])), 66);
}

#[test]
fn certify_fresh_and_tampered_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    assert_eq!(code(&ccc4(&["solve", "--masses", "1,1,1,1", "--out", path.to_str().unwrap()])), 0);
    let o = ccc4(&["certify", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let mut rec: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let lambda = rec["multipliers"]["lambda"].as_f64().unwrap();
    rec["multipliers"]["lambda"] = serde_json::json!(lambda * 1.01);
    fs::write(&path, rec.to_string()).unwrap();
    let o = ccc4(&["certify", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let st = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "stationarity").unwrap();
    assert_eq!(st["passed"], false);

    assert_eq!(code(&ccc4(&["certify", "--in", "/nonexistent.json"])), 66);
    fs::write(&path, "not json").unwrap();
    assert_eq!(code(&ccc4(&["certify", "--in", path.to_str().unwrap()])), 66);
}

#[test]
fn identities_table() {
    let o = ccc4(&["identities", "--samples", "500", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names[0], "pech");
    assert_eq!(names.len(), 12);
    assert!(text.lines().skip(1).all(|l| l.ends_with("pass")));
    assert_eq!(ccc4(&["identities", "--samples", "500", "--seed", "1"]).stdout, o.stdout);
    assert_eq!(code(&ccc4(&["identities", "--samples", "0"])), 64);
}
