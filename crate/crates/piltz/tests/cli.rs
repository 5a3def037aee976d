use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn field(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fields").join(name).display().to_string()
}

fn piltz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piltz")).args(args).env_remove("PILTZ_CACHE_DIR").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exponents_for_the_divisor_problem() {
    let v = json_of(&piltz(&["exponents", &field("q.json"), "--k", "2"]));
    assert!((v["beta"].as_f64().unwrap() - 1.139_881_574_842_309_7).abs() < 1e-12);
    assert_eq!(v["gamma"].as_f64(), Some(-0.375));
    assert_eq!(v["gamma_exact"], "-3/8");
    assert_eq!(v["gamma_gkmn_exact"], "-5/8");
}

#[test]
fn gaussian_divisor_table() {
    let out = piltz(&["divisors", &field("qi.json"), "--k", "1", "--n", "10"]);
    assert!(out.status.success());
    // r_2(n)/4
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,d\n1,1\n2,1\n3,0\n4,1\n5,2\n6,0\n7,0\n8,1\n9,1\n10,2\n");

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = piltz(&["divisors", &field("q.json"), "--k", "2", "--n", "12", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().nth(12), Some("12,6"));
}

#[test]
fn field_info_shorthand() {
    let a = json_of(&piltz(&["field", &field("q.json")]));
    let b = json_of(&piltz(&["field", "info", &field("q.json")]));
    assert_eq!(a, b);
    assert_eq!((a["m"].as_u64(), a["r1"].as_u64(), a["r2"].as_u64(), a["D"].as_u64()), (Some(1), Some(1), Some(0), Some(1)));
    let c = json_of(&piltz(&["field", &field("cubic23.json")]));
    assert_eq!((c["r1"].as_u64(), c["r2"].as_u64(), c["D"].as_u64()), (Some(1), Some(1), Some(23)));
}

#[test]
fn densities_exact_and_empirical() {
    let exact = json_of(&piltz(&["field", "densities", &field("quintic.json"), "--exact"]));
    assert_eq!(exact["exact"], serde_json::json!(["2/5", "1/4", "1/3", "0", "0", "1/60"]));
    let emp = json_of(&piltz(&["densities", &field("qi.json"), "--bound", "100000"]));
    assert_eq!(emp["source"], "empirical");
    assert!((emp["deltas"][2].as_f64().unwrap() - 0.5).abs() < 0.01);
}

#[test]
fn exit_codes_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"label": "x", "coeffs": [1, 0, -1]}"#).unwrap();
    let out = piltz(&["field", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "config");

    // too short a table for the Laurent fit
    let out = piltz(&["mainterm", &field("q.json"), "--k", "1", "--order", "1", "--table", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "computation");

    assert_eq!(piltz(&["divisors", &field("q.json"), "--k", "2"]).status.code(), Some(1));
    assert_eq!(piltz(&["exponents", &field("q.json"), "--k", "1"]).status.code(), Some(2));
}

#[test]
fn mainterm_and_delta() {
    let v = json_of(&piltz(&["mainterm", &field("q.json"), "--k", "2", "--order", "2"]));
    let c = &v["laurent"]["c"];
    assert!((c[0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((c[1].as_f64().unwrap() - 0.577_215_664_901_532_9).abs() < 1e-4);
    let d = json_of(&piltz(&["delta", &field("q.json"), "--k", "2", "--x", "100"]));
    assert_eq!(d["summatory"].as_u64(), Some(482));
    assert!((d["delta"].as_f64().unwrap() - 6.039_848_420_884_269).abs() < 1e-3);
}

#[test]
fn voronoi_reports() {
    let v = json_of(&piltz(&["voronoi", &field("q.json"), "--k", "2", "--x", "10", "--alpha", "4"]));
    assert!(v["gaussian_mass"].as_f64().unwrap() >= 1.0 - 1e-12);
    assert!(v["abs_diff"].as_f64().unwrap().is_finite());
    let out = piltz(&["voronoi", &field("qi.json"), "--k", "1", "--x", "5", "--alpha", "4", "--terms", "20", "--report", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,d,amplitude,phase,value"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn resonate_is_deterministic_across_threads() {
    let args = |t: &'static str| ["--threads", t, "resonate", "--k", "2", "--X", "1000", "--grid", "100000"];
    let q = field("q.json");
    let run = |t| {
        let mut a: Vec<&str> = args(t).to_vec();
        a.insert(3, &q);
        piltz(&a)
    };
    let one = run("1");
    let three = run("3");
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, three.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["M_size"].as_u64(), Some(7));
    assert_eq!(v["within_proxies"], true);
    for key in ["x_star", "max_abs", "bound_rhs", "margin", "alpha", "kappa"] {
        assert!(v[key].is_number(), "{key}");
    }
}

#[test]
fn sieve_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_piltz"))
            .args(["divisors", &field("cubic23.json"), "--k", "2", "--n", "5000"])
            .env("PILTZ_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, piltz(&["divisors", &field("cubic23.json"), "--k", "2", "--n", "5000"]).stdout);
}
