use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ncball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncball")).args(args).output().expect("spawn ncball")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn fixture(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn scalar_problem(dir: &TempDir, b0: f64, b1: f64) -> PathBuf {
    fixture(
        dir,
        "problem.json",
        &format!(r#"{{"n":1,"m":1,"block_size":1,"coefficients":{{"":[[[{b0},0.0]]],"1":[[[{b1},0.0]]]}}}}"#),
    )
}

fn entry(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn basis_lists_graded_words() {
    let out = ncball(&["basis", "2", "2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["tool"], "ncball");
    assert_eq!(v["result"]["dimension"], 7);
    let words: Vec<&str> = v["result"]["words"].as_array().unwrap().iter().map(|w| w.as_str().unwrap()).collect();
    assert_eq!(words, ["", "1", "2", "11", "12", "21", "22"]);

    let out = ncball(&["basis", "1", "3"]);
    assert_eq!(stdout_json(&out)["result"]["words"], serde_json::json!(["", "1", "11", "111"]));

    let out = ncball(&["basis", "3", "0"]);
    assert_eq!(stdout_json(&out)["result"]["words"], serde_json::json!([""]));
}

#[test]
fn input_errors_exit_three() {
    assert_eq!(code(&ncball(&["basis", "10", "2"])), 3);
    assert_eq!(code(&ncball(&["basis", "0", "2"])), 3);
    assert_eq!(code(&ncball(&["no-such-command"])), 3);
    assert_eq!(code(&ncball(&["check", "/nonexistent/problem.json"])), 3);
    assert_eq!(code(&ncball(&["--tol", "-1", "basis", "1", "1"])), 3);

    let dir = TempDir::new().unwrap();
    let bad = fixture(&dir, "bad.json", r#"{"n":2,"m":1,"block_size":1,"coefficients":{"":[[[1.0,0.0]]],"3":[[[0.1,0.0]]]}}"#);
    assert_eq!(code(&ncball(&["check", s(&bad)])), 3);
    let junk = fixture(&dir, "junk.json", "not json");
    assert_eq!(code(&ncball(&["check", s(&junk)])), 3);
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&ncball(&["--help"])), 0);
    assert_eq!(code(&ncball(&["--version"])), 0);
}

#[test]
fn check_reports_min_eigenvalue() {
    let dir = TempDir::new().unwrap();
    let p = scalar_problem(&dir, 1.0, 0.5);
    let out = ncball(&["check", s(&p)]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "feasible");
    // [[1, 0.5], [0.5, 1]] has eigenvalues 0.5 and 1.5.
    assert!((v["result"]["min_eig"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let p = scalar_problem(&dir, 2.0, 3.0);
    let out = ncball(&["check", s(&p)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["status"], "infeasible");
}

#[test]
fn extend_exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = scalar_problem(&dir, 2.0, 1.9);
    let out = ncball(&["extend", s(&p), "--target-degree", "3"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["extension"]["target_degree"], 3);
    assert_eq!(v["result"]["verification"]["passed"], true);
    assert!(v["result"]["extension"]["certificate"]["min_eig_tm"].as_f64().unwrap() >= -1e-8);
    let coeffs = v["result"]["extension"]["coeffs"].as_object().unwrap();
    assert_eq!(coeffs.len(), 4);
    assert_eq!(entry(&coeffs["1"][0][0]), (1.9, 0.0));

    let out = ncball(&["extend", s(&p), "--target-degree", "3", "--max-iter", "1"]);
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "no-convergence");
    assert!(v["result"]["residual"].as_f64().unwrap() > 0.0);

    let p = scalar_problem(&dir, 2.0, 3.0);
    assert_eq!(code(&ncball(&["extend", s(&p), "--target-degree", "3"])), 1);
}

#[test]
fn output_file_is_written() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("out.json");
    let out = ncball(&["basis", "1", "3", "--output", s(&target)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["result"]["dimension"], 4);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn floats_carry_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    let p = scalar_problem(&dir, 1.0, 0.1);
    let out = ncball(&["check", s(&p)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"min_eig\":9.0000000000000002e-1"), "{text}");
}

const SERIES: &str = r#"{"n":2,"cutoff":4,"shape":[1,1],"coefficients":{
    "1":[[[0.4,0.1]]],"2":[[[-0.2,0.0]]],"12":[[[0.3,-0.2]]],"211":[[[0.1,0.05]]]}}"#;

#[test]
fn cayley_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = fixture(&dir, "f.json", SERIES);
    let g = dir.path().join("g.json");
    assert_eq!(code(&ncball(&["cayley", "forward", s(&f), "--output", s(&g)])), 0);
    let back = ncball(&["cayley", "inverse", s(&g)]);
    assert_eq!(code(&back), 0);
    let back = stdout_json(&back);
    let original: Value = serde_json::from_str(SERIES).unwrap();
    for (w, c) in back["result"]["coefficients"].as_object().unwrap() {
        let (re, im) = entry(&c[0][0]);
        let (re0, im0) = original["coefficients"].get(w).map_or((0.0, 0.0), |c0| entry(&c0[0][0]));
        assert!((re - re0).abs() <= 1e-10 && (im - im0).abs() <= 1e-10, "word {w}");
    }
}

#[test]
fn cayley_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let f = fixture(
        &dir,
        "f.json",
        r#"{"n":1,"cutoff":2,"shape":[1,1],"coefficients":{"":[[[1.0,0.0]]],"1":[[[1.0,0.0]]]}}"#,
    );
    assert_eq!(code(&ncball(&["cayley", "forward", s(&f)])), 3);
    assert_eq!(code(&ncball(&["cayley", "sideways", s(&f)])), 3);
}

const NILPOTENT_PAIR: &str = r#"{"n":2,"dim":2,"matrices":[
    [[[0,0],[0.5,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0.3]],[[0,0],[0,0]]]]}"#;

#[test]
fn eval_at_zero_is_constant_term() {
    let dir = TempDir::new().unwrap();
    let f = fixture(
        &dir,
        "f.json",
        r#"{"n":2,"cutoff":2,"shape":[1,1],"coefficients":{"":[[[0.7,-0.2]]],"1":[[[1.0,0.0]]],"21":[[[2.0,0.0]]]}}"#,
    );
    let zero = fixture(&dir, "zero.json", r#"{"n":2,"dim":1,"matrices":[[[[0,0]]],[[[0,0]]]]}"#);
    let out = ncball(&["eval", s(&f), s(&zero)]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(entry(&v["result"]["value"][0][0]), (0.7, -0.2));
    assert_eq!(v["result"]["tail_estimate"].as_f64(), Some(0.0));
}

#[test]
fn eval_on_nilpotent_pair() {
    let dir = TempDir::new().unwrap();
    let f = fixture(&dir, "f.json", SERIES);
    let x = fixture(&dir, "x.json", NILPOTENT_PAIR);
    let out = ncball(&["eval", s(&f), s(&x)]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    // Only the degree-one terms survive: (0.4+0.1i)(0.5) + (-0.2)(0.3i).
    let (re, im) = entry(&v["result"]["value"][0][1]);
    assert!((re - 0.2).abs() < 1e-15 && (im - (0.05 - 0.06)).abs() < 1e-15);
    assert_eq!(v["result"]["jsr"]["nilpotent_order"], 2);
}

#[test]
fn divergence_exits_four() {
    let dir = TempDir::new().unwrap();
    let f = fixture(&dir, "f.json", r#"{"n":1,"cutoff":1,"shape":[1,1],"coefficients":{"1":[[[5.0,0.0]]]}}"#);
    let x = fixture(&dir, "x.json", r#"{"n":1,"dim":1,"matrices":[[[[0.95,0.0]]]]}"#);
    let out = ncball(&["eval", s(&f), s(&x)]);
    assert_eq!(code(&out), 4);
    assert!(out.stdout.is_empty());
}

#[test]
fn norm_of_row_contraction_symbol() {
    let dir = TempDir::new().unwrap();
    let f = fixture(
        &dir,
        "f.json",
        r#"{"n":2,"cutoff":1,"shape":[1,1],"coefficients":{"1":[[[1.0,0.0]]],"2":[[[1.0,0.0]]]}}"#,
    );
    let out = ncball(&["norm", s(&f), "--trunc", "2"]);
    assert_eq!(code(&out), 0);
    let norm = stdout_json(&out)["result"]["norm_lower_bound"].as_f64().unwrap();
    assert!((norm - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(code(&ncball(&["norm", s(&f)])), 3);
}

#[test]
fn poisson_matches_direct_evaluation() {
    let dir = TempDir::new().unwrap();
    let h = fixture(
        &dir,
        "h.json",
        r#"{"n":2,"cutoff":2,"shape":[1,1],
            "analytic":{"":[[[1.0,0.0]]],"1":[[[0.3,0.1]]],"12":[[[0.2,0.0]]]},
            "coanalytic":{"2":[[[0.1,0.0]]]}}"#,
    );
    let x = fixture(&dir, "x.json", NILPOTENT_PAIR);
    let out = ncball(&["poisson", s(&h), s(&x), "--trunc", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["result"]["discrepancy"].as_f64().unwrap() < 1e-12);
    assert_eq!(code(&ncball(&["poisson", s(&h), s(&x), "--trunc", "2"])), 3);
}

#[test]
fn selftest_list_and_canary() {
    let out = ncball(&["selftest", "--list"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 12);

    let out = ncball(&["selftest", "--canary"]);
    assert_ne!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[FAIL] 01"), "{text}");
}

#[test]
fn selftest_passes_with_default_seed() {
    let out = ncball(&["selftest"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 12);
}
