//! End-to-end runs of the `thciz` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn thciz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thciz")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = thciz(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn stdout(args: &[&str]) -> String {
    let out = thciz(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "--D", "2", "--family", "micro-a", "--beta", "0.5", "--eps", "0.5"]);
    assert_eq!(v["regime"], "I");
    assert_eq!(v["gamma"], 1.5);
    assert_eq!(v["delta"], 1.0);
    let v = json(&["classify", "--D", "1", "--beta-a", "0", "--beta-b", "1"]);
    assert_eq!(v["regime"], "D1-2");
    assert_eq!((v["gamma"].as_f64(), v["delta"].as_f64()), (Some(1.0), Some(1.0)));
    let v = json(&["classify", "--D", "2", "--family", "micro-a", "--beta", "2", "--eps", "0"]);
    assert_eq!(v["regime"], "VIII");
}

#[test]
fn classify_accepts_exact_rationals_on_boundaries() {
    // β = 1 − ε(D−1) with ε = 1/3 at D = 2 sits on the boundary line of item II
    let v = json(&["classify", "--D", "2", "--family", "micro-a", "--beta", "2/3", "--eps", "1/3"]);
    assert_eq!(v["regime"], "II");
}

#[test]
fn classify_round_trips_through_the_schema() {
    let v = json(&["classify", "--D", "3", "--family", "symmetric", "--beta", "0.2", "--eps", "0.1"]);
    let report: thciz::regimes::RegimeReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(report).unwrap(), v);
}

#[test]
fn enumerate_counts() {
    let count = |args: &[&str]| stdout(args).lines().count() - 1;
    assert_eq!(count(&["enumerate", "--D", "2", "--n", "3", "--regime", "V"]), 2);
    assert_eq!(count(&["enumerate", "--D", "2", "--n", "2", "--regime", "VI"]), 3);
    assert_eq!(count(&["enumerate", "--D", "2", "--n", "3", "--regime", "IV"]), 10);
    let structured = stdout(&["enumerate", "--D", "2", "--n", "3", "--beta", "1/2", "--eps", "1/2"]);
    let brute = stdout(&["enumerate", "--D", "2", "--n", "3", "--beta", "1/2", "--eps", "1/2", "--brute-force"]);
    let sorted = |s: &str| {
        let mut v: Vec<String> = s.lines().map(String::from).collect();
        v.sort();
        v
    };
    assert_eq!(sorted(&structured), sorted(&brute));
}

#[test]
fn coefficient_examples() {
    for (s, t, want) in [("2,1;2,1", "2,1;2,1", "1"), ("2,1;2,1", "1,2;1,2", "1"), ("2,3,1;2,3,1", "2,3,1;2,3,1", "1")] {
        let v = json(&["coefficient", "--sigma", s, "--tau", t]);
        assert_eq!(v["exact"], want, "{s} {t}");
    }
    let csv = stdout(&["--format", "csv", "coefficient", "--sigma", "2,1", "--tau", "2,1"]);
    assert!(csv.starts_with("sigma,tau,exact,decimal\n"));
}

#[test]
fn invariant_and_fit_examples() {
    let v = json(&["invariant", "--state", "one-uniform", "--D", "2", "--N", "4", "--sigma", "2,1;1,2"]);
    assert!((v["re"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["exact"], "1/4");
    let v = json(&["fit", "--family", "max-mixed", "--D", "2", "--N", "2,3,4,5"]);
    assert!((v["beta_hat"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["eps_hat"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn exported_tensor_files_evaluate_like_the_state() {
    let dir = std::env::temp_dir().join(format!("thciz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("state.bin");
    let p = path.to_str().unwrap();
    stdout(&["export-state", "--state", "interpolation:1,2,2", "--D", "2", "--N", "4", "--out", p]);
    let from_file = json(&["invariant", "--tensor", p, "--sigma", "2,3,1;1,3,2"]);
    let direct = json(&["invariant", "--state", "interpolation:1,2,2", "--D", "2", "--N", "4", "--sigma", "2,3,1;1,3,2"]);
    assert!((from_file["re"].as_f64().unwrap() - direct["re"].as_f64().unwrap()).abs() < 1e-6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_exact_first_moment() {
    let csv = stdout(&["oracle-exact", "--state-a", "pure", "--state-b", "max-mixed", "--D", "2", "--N", "3", "--n", "2"]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 1.0 / 9.0).abs() < 1e-12);
    // B is a multiple of the identity: the overlap is constant
    let row2: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert!(row2[3].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let args = ["simulate", "--regime", "V", "--D", "2", "--N", "3", "--n", "2", "--samples", "5000", "--seed", "7"];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let two = stdout(&[&args[..], &["--threads", "2"]].concat());
    assert_eq!(one, two);
    assert!(one.starts_with("N,n,regime,gamma,delta,measured,stderr,predicted,ratio"));
}

#[test]
fn exit_codes() {
    let validation = thciz(&["coefficient", "--sigma", "2,1", "--tau", "1,2;1,2"]);
    assert_eq!(validation.status.code(), Some(2));
    let parse = thciz(&["coefficient", "--sigma", "2,2", "--tau", "1,2"]);
    assert_eq!(parse.status.code(), Some(2));
    let outside = thciz(&["classify", "--D", "2", "--family", "micro-a", "--beta", "-1", "--eps", "0"]);
    assert_eq!(outside.status.code(), Some(2));
    let cap = thciz(&["enumerate", "--D", "3", "--n", "5", "--beta", "0", "--eps", "0", "--brute-force"]);
    assert_eq!(cap.status.code(), Some(3));
    let ok = thciz(&["classify", "--D", "2", "--beta", "0", "--eps", "0"]);
    assert!(String::from_utf8_lossy(&ok.stderr).contains("# config: "));
}
