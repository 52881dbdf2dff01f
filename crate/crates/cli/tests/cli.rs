use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ecertify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecertify")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = ecertify(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn worker() -> &'static str {
    env!("CARGO_BIN_EXE_ecertify-model-worker")
}

#[test]
fn certify_writes_a_result_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    ok(&["certify", "--dim", "1", "--strategy", "unif", "--budget", "1000", "--repeat", "3", "--out", out.to_str().unwrap()]);
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for r in runs {
        assert_eq!(r["w"].as_f64().unwrap(), 1.0);
    }
    assert_eq!(doc["summary"]["runs"], 3);
}

#[test]
fn certify_without_timing_is_reproducible() {
    let args = ["certify", "--dim", "3", "--budget", "500", "--seed", "4", "--no-timing"];
    assert_eq!(ok(&args), ok(&args));
    let mut par = args.to_vec();
    par.push("--parallel");
    assert_eq!(ok(&args), ok(&par));
}

#[test]
fn certify_csv_has_one_row_per_seed() {
    let csv = ok(&["certify", "--dim", "2", "--budget", "300", "--repeat", "4", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("seed,w,"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn certify_with_explanation_file_and_x0() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    std::fs::write(&e, r#"{"alpha": [0.75, 0.75]}"#).unwrap();
    let out = ok(&["certify", "--dim", "2", "--x0", "0,0", "--explanation", e.to_str().unwrap(), "--budget", "500", "--no-timing"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let w = doc["runs"][0]["w"].as_f64().unwrap();
    assert!(w > 0.25 && w < 0.75, "w = {w}");
}

#[test]
fn certify_reports_minus_one_when_x0_fails() {
    let out = ok(&["certify", "--dim", "1", "--alpha", "5", "--intercept", "3", "--x0", "0.5", "--no-timing"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["runs"][0]["w"].as_f64().unwrap(), -1.0);
    assert_eq!(doc["runs"][0]["total_queries"], 1);
}

#[test]
fn certify_against_external_command() {
    let cmd = format!("{} --mode pwl", worker());
    let out = ok(&["certify", "--blackbox-cmd", &cmd, "--dim", "1", "--strategy", "unifi", "--budget", "500", "--no-timing"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["runs"][0]["w"].as_f64().unwrap(), 1.0);
    let builtin = ok(&["certify", "--dim", "1", "--strategy", "unifi", "--budget", "500", "--no-timing"]);
    assert_eq!(out, builtin);
}

#[test]
fn timeout_environment_variable_is_honored() {
    let cmd = format!("{} --mode pwl --sleep-ms 3000", worker());
    let out = Command::new(env!("CARGO_BIN_EXE_ecertify"))
        .args(["certify", "--blackbox-cmd", &cmd, "--dim", "1"])
        .env("ECERT_TIMEOUT_SECS", "1")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn unknown_builtin_and_bad_flags_fail() {
    assert!(!ecertify(&["certify", "--blackbox", "nope"]).status.success());
    assert!(!ecertify(&["certify", "--strategy", "nope"]).status.success());
    assert!(!ecertify(&["certify", "--repeat", "0"]).status.success());
}

fn certified_run(dir: &Path, strategy: &str) -> String {
    let out = dir.join(format!("{strategy}.json"));
    ok(&["certify", "--dim", "1", "--strategy", strategy, "--budget", "100", "--repeat", "3", "--no-timing", "--out", out.to_str().unwrap()]);
    out.to_str().unwrap().to_string()
}

fn bound_values(args: &[&str]) -> Vec<f64> {
    let doc: Value = serde_json::from_str(&ok(args)).unwrap();
    doc["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["result"]["probability_lower_bound"].as_f64().unwrap())
        .collect()
}

#[test]
fn bounds_theta_proxy_is_conservative_and_epsilon_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let input = certified_run(dir.path(), "unif");
    let theta = bound_values(&["bounds", &input, "--proxy", "theta"]);
    let fhat = bound_values(&["bounds", &input, "--proxy", "fhat"]);
    assert_eq!(theta.len(), 3);
    for (t, f) in theta.iter().zip(&fhat) {
        assert!(t <= f, "theta {t} > fhat {f}");
    }
    let mut prev = vec![0.0; 3];
    for eps in ["0.001", "0.01", "0.05"] {
        let b = bound_values(&["bounds", &input, "--epsilon", eps]);
        for (now, before) in b.iter().zip(&prev) {
            assert!(now >= before);
        }
        prev = b;
    }
}

#[test]
fn bounds_evt_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = certified_run(dir.path(), "unif");
    let doc: Value =
        serde_json::from_str(&ok(&["bounds", &input, "--method", "evt", "--kappa", "0.5", "--confidence", "0.9"])).unwrap();
    let first = &doc["bounds"][0]["result"];
    assert_eq!(first["method"], "evt");
    let w = &first["evt_width"];
    assert!(w["simplified"].as_f64().unwrap() >= w["exact"].as_f64().unwrap());
    let csv = ok(&["bounds", &input, "--format", "csv"]);
    assert!(csv.starts_with("seed,probability_lower_bound"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn bounds_records_per_run_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = certified_run(dir.path(), "adapti");
    let doc: Value = serde_json::from_str(&ok(&["bounds", &input, "--method", "evt"])).unwrap();
    for b in doc["bounds"].as_array().unwrap() {
        assert!(b["result"].is_null());
        assert!(b["error"].as_str().unwrap().contains("i.i.d."));
    }
}

#[test]
fn bench_writes_csv_table() {
    let csv = ok(&["bench", "--dim", "1,2", "--budget", "200", "--strategy", "unif,adapti", "--repeat", "2"]);
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "w_mean"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
}

#[test]
fn coverage_command() {
    let dir = tempfile::tempdir().unwrap();
    let data: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.01]).collect();
    let expl: Vec<Value> = data.iter().map(|_| serde_json::json!({"alpha": [1.0]})).collect();
    let d = dir.path().join("data.json");
    let e = dir.path().join("expl.json");
    std::fs::write(&d, serde_json::to_string(&data).unwrap()).unwrap();
    std::fs::write(&e, serde_json::to_string(&expl).unwrap()).unwrap();
    let out = ok(&["coverage", "--dim", "1", "--data", d.to_str().unwrap(), "--explanations", e.to_str().unwrap(), "--budget", "200"]);
    let rep: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rep["dataset_size"], 20);
    assert_eq!(rep["explanations"], 1);
    assert_eq!(rep["coverage_fraction"].as_f64().unwrap(), 1.0);
}

#[test]
fn stability_command() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    std::fs::write(&e, "[[3, 2, 1, 0], [3, 2, 1, 0], [0, 1, 2, 3]]").unwrap();
    let rep: Value = serde_json::from_str(&ok(&["stability", "--explanations", e.to_str().unwrap(), "--k", "2"])).unwrap();
    assert_eq!(rep["k"], 2);
    assert_eq!(rep["top_k_intersection"]["mean"].as_f64().unwrap(), 0.5);
    assert_eq!(rep["spearman"]["mean"].as_f64().unwrap(), 0.0);
    assert!(!ecertify(&["stability", "--explanations", e.to_str().unwrap(), "--k", "9"]).status.success());
}
