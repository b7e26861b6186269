use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eigenpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenpath")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write_diag(path: &Path, d: &[f64]) {
    let n = d.len();
    let mut entries = vec![[0.0, 0.0]; n * n];
    for (i, &x) in d.iter().enumerate() {
        entries[i * n + i] = [x, 0.0];
    }
    let json = serde_json::json!({ "rows": n, "cols": n, "entries": entries });
    std::fs::write(path, json.to_string()).unwrap();
}

fn zeta(v: &Value) -> (f64, f64) {
    (v["zeta"][0].as_f64().unwrap(), v["zeta"][1].as_f64().unwrap())
}

#[test]
fn solve_one_on_a_diagonal_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.json");
    write_diag(&input, &[2.0, 1.0]);
    let out = eigenpath(&["solve-one", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let (re, im) = zeta(&v);
    assert!((re - 2.0).abs() < 1e-9 && im.abs() < 1e-9, "{v}");
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn solve_all_finds_both_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.json");
    write_diag(&input, &[5.0, 9.0]);
    let out = eigenpath(&["solve-all", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["distinct"], Value::Bool(true));
    let mut re: Vec<f64> = v["pairs"].as_array().unwrap().iter().map(|p| zeta(p).0).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] - 5.0).abs() < 1e-9 && (re[1] - 9.0).abs() < 1e-9, "{re:?}");
}

#[test]
fn binary_input_matches_json_input() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("a.json");
    let bin = dir.path().join("a.bin");
    write_diag(&json, &[3.0, -1.0, 0.5]);
    let mut bytes = b"EIGP".to_vec();
    bytes.extend_from_slice(&3u32.to_le_bytes());
    for i in 0..3 {
        for j in 0..3 {
            let x = if i == j { [3.0, -1.0, 0.5][i] } else { 0.0 };
            bytes.extend_from_slice(&f64::to_le_bytes(x));
            bytes.extend_from_slice(&0f64.to_le_bytes());
        }
    }
    std::fs::write(&bin, bytes).unwrap();
    let a = eigenpath(&["solve-one", "--input", json.to_str().unwrap()]);
    let b = eigenpath(&["solve-one", "--input", bin.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn random_matrix_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = eigenpath(&["solve-random", "--n", "5", "--seed", "11", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v["proposals"].as_u64().unwrap() >= 1);
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["w"].as_array().unwrap().len(), 5);
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["solve-random", "--n", "4", "--seed", "3"];
    assert_eq!(eigenpath(&args).stdout, eigenpath(&args).stdout);
}

#[test]
fn refine_reaches_target() {
    let out = eigenpath(&["refine", "--n", "4", "--seed", "5", "--epsilon", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_json(&out)["iterations"].as_u64().is_some());
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(eigenpath(&["refine", "--n", "4", "--seed", "5", "--epsilon", "0.7"]).status.code(), Some(2));
    assert_eq!(eigenpath(&["solve-one"]).status.code(), Some(2));
    assert_eq!(eigenpath(&["bench"]).status.code(), Some(2));
    assert_eq!(eigenpath(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(eigenpath(&["solve-one", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_with_kind() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("i.json");
    write_diag(&input, &[1.0, 1.0, 1.0]);
    let out = eigenpath(&["solve-all", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "ill_posed");
}

#[test]
fn step_budget_exits_4() {
    let out = eigenpath(&["solve-one", "--n", "6", "--seed", "1", "--max-steps", "5"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_json(&out)["error"].is_string());
}

#[test]
fn bench_csv_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let path = dir.path().join(format!("b{jobs}.csv"));
        let p = path.to_str().unwrap();
        let out = eigenpath(&[
            "bench", "--experiment", "b", "--n", "2,3", "--trials", "200", "--seed", "9", "--format", "csv",
            "--jobs", jobs, "--out", p,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join(format!("b{jobs}.csv.report.json")).exists());
        std::fs::read_to_string(path).unwrap()
    };
    let one = run("1");
    assert!(one.starts_with("experiment,n,trial,metric,value,status"));
    assert_eq!(one, run("2"));
}

#[test]
fn bench_json_has_report() {
    let out = eigenpath(&["bench", "--experiment", "d", "--n", "3", "--trials", "50", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["report"]["metrics"].is_array());
    assert_eq!(v["rows"].as_array().unwrap().len(), 50);
}
