use std::path::Path;

use assert_cmd::Command;
use serde_json::Value;

fn levyq() -> Command {
    Command::cargo_bin("levyq").unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Runs with JSON output, checks the schema and returns the document.
fn json(args: &[&str]) -> Value {
    let out = levyq().args(args).assert().success().get_output().stdout.clone();
    let v: Value = serde_json::from_slice(&out).unwrap();
    let validator = schema("output.schema.json");
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    v
}

fn stderr(args: &[&str]) -> String {
    String::from_utf8(levyq().args(args).assert().success().get_output().stderr.clone()).unwrap()
}

#[test]
fn sweep_reproduces_best_anchor() {
    let v = json(&["sweep", "--spec", "exp(1)", "--n", "4..512*2", "--mode", "best"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["n"], 4);
    assert_eq!(rows[0]["n_error"].as_f64().unwrap(), 0.345951716354);
    let err = stderr(&["sweep", "--spec", "exp(1)", "--n", "4..512*2", "--mode", "best"]);
    assert!(err.contains("n = 4, n·error = 0.3459"), "{err}");
}

#[test]
fn sweep_csv_columns() {
    let out =
        levyq().args(["sweep", "-s", "exp(1)", "-n", "4,8", "--mode", "uniform", "--format", "csv"]).assert().success();
    let text = String::from_utf8(out.get_output().stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,error,n_error,predicted_limit,second_order"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "4");
    assert!(first[2].starts_with("0.44464694"));
    assert_eq!(first[3], "0.5");
}

#[test]
fn limits_print_normal_best_limit() {
    let v = json(&["limits", "--spec", "normal(0,1)"]);
    let best = v["reports"].as_array().unwrap().iter().find(|r| r["kind"] == "best-limit").unwrap();
    assert!((best["value"].as_f64().unwrap() - 0.393179721480).abs() < 1e-11);
    let err = stderr(&["limits", "--spec", "normal(0,1)"]);
    assert!(err.contains("best-limit 0.3931"), "{err}");
}

#[test]
fn limits_with_second_order() {
    let v = json(&["limits", "--spec", "pareto(1)", "-n", "512"]);
    let kinds: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"second-order"));
}

#[test]
fn dist_of_representable_measure_is_zero() {
    let atoms = r#"{"atoms": [{"x": -1, "p": 0.5}, {"x": 1, "p": 0.5}]}"#;
    let v = json(&["dist", "--spec", "two_point(1/2)", "--atoms", atoms]);
    assert_eq!(v["distance"], 0.0);
}

#[test]
fn dist_normalises_nearly_summing_weights() {
    let atoms = r#"{"atoms": [{"x": -1, "p": 0.3}, {"x": 1, "p": 0.7000000004}]}"#;
    let out = levyq().args(["dist", "--spec", "two_point(3/10)", "--atoms", atoms]).assert().success();
    assert!(String::from_utf8_lossy(&out.get_output().stderr).contains("warning"));
    let bad = r#"{"atoms": [{"x": -1, "p": 0.3}, {"x": 1, "p": 0.8}]}"#;
    levyq().args(["dist", "--spec", "two_point(3/10)", "--atoms", bad]).assert().code(2);
}

#[test]
fn best_and_uniform_outputs() {
    let v = json(&["best", "--spec", "exp(1)", "-n", "4"]);
    assert_eq!(v["atoms"].as_array().unwrap().len(), 4);
    assert_eq!(v["certificate"]["weights"], true);
    let v = json(&["uniform", "--spec", "uniform(0,1)", "-n", "5"]);
    assert_eq!(v["error"].as_f64().unwrap(), 0.05);
}

#[test]
fn density_and_verify() {
    let v = json(&["density", "--spec", "exp(1)", "--x", "0..3", "--points", "7", "-n", "50"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    let d0 = v["rows"][0]["density"].as_f64().unwrap();
    assert!((d0 - 1.0 / (2.0 * std::f64::consts::LN_2)).abs() < 1e-9);
    let v = json(&["verify", "--spec", "two_point(3/10)", "--n-max", "2", "--resolution", "1e-3"]);
    assert_eq!(v["ok"], true);
}

#[test]
fn verify_violation_exits_one() {
    levyq()
        .args(["verify", "--spec", "exp(1)", "--n-max", "1", "--resolution", "1e-2", "--tolerance", "1e-9"])
        .assert()
        .code(1);
}

#[test]
fn exit_codes() {
    levyq().args(["best", "--spec", "exp(", "-n", "4"]).assert().code(2);
    levyq().args(["best", "--spec", "exp(1)", "-n", "0"]).assert().code(2);
    levyq().args(["best", "--spec", "exp(1)", "-n", "2", "--eps", "-1"]).assert().code(2);
    levyq().args(["sweep", "--spec", "exp(1)", "-n", "9..3"]).assert().code(2);
    levyq().args(["best", "--spec", "nosuch(1)", "-n", "4"]).assert().code(4);
    levyq().args(["density", "--spec", "cantor"]).assert().code(4);
    levyq().env("LEVYQ_THREADS", "zero").args(["best", "--spec", "exp(1)", "-n", "2"]).assert().code(2);
}

#[test]
fn limits_skip_quantities_that_do_not_apply() {
    // float masses cannot enter the exact atom calculus
    let err = stderr(&["limits", "--spec", r#"{"atoms": [[0, 0.3], [1, 0.7]]}"#]);
    assert!(err.contains("uniform limsup does not apply"), "{err}");
    let limsup = |spec: &str| {
        let v = json(&["limits", "--spec", spec]);
        let r = v["reports"].as_array().unwrap().iter().find(|r| r["kind"] == "uniform-limsup").unwrap().clone();
        r["value"].as_f64().unwrap()
    };
    assert_eq!(limsup(r#"{"atoms": [[0, "3/10"], [1, "7/10"]]}"#), 0.5);
    assert_eq!(limsup(r#"{"atoms": [[0, "1/3"], [1, "2/3"]]}"#), 0.333333333333);
}

#[test]
fn spec_from_files() {
    let dir = std::env::temp_dir().join(format!("levyq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("atoms.csv");
    std::fs::write(&csv, "location,mass\n0,1/4\n2,3/4\n").unwrap();
    let v = json(&["best", "--spec", csv.to_str().unwrap(), "-n", "2"]);
    assert_eq!(v["error"], 0.0);
    let js = dir.join("spec.json");
    std::fs::write(&js, r#"{"family": "exponential", "params": {"a": 2}}"#).unwrap();
    let v = json(&["uniform", "--spec", js.to_str().unwrap(), "-n", "3"]);
    assert_eq!(v["spec"], "exponential(2)");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn output_to_file_and_threads() {
    let path = std::env::temp_dir().join(format!("levyq-out-{}.csv", std::process::id()));
    levyq()
        .env("LEVYQ_THREADS", "2")
        .args(["sweep", "--spec", "benford(10)", "-n", "1..6", "--format", "csv", "-o", path.to_str().unwrap()])
        .assert()
        .success()
        .stdout("");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 7);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn input_schemas_accept_examples() {
    let atoms = schema("atoms.schema.json");
    assert!(atoms.is_valid(&serde_json::json!({"atoms": [{"x": 0.5, "p": 1}]})));
    assert!(!atoms.is_valid(&serde_json::json!({"atoms": []})));
    let spec = schema("spec.schema.json");
    assert!(spec.is_valid(&serde_json::json!({"family": "two_point", "params": {"a": "3/10"}})));
    assert!(spec.is_valid(&serde_json::json!({"atoms": [[0, "1/2"], {"x": 1, "p": 0.5}]})));
    assert!(!spec.is_valid(&serde_json::json!({"family": "gamma"})));
}

#[test]
fn reruns_are_bit_identical() {
    let args = ["sweep", "--spec", "normal(0,1)", "-n", "10..200+10", "--mode", "uniform"];
    let a = levyq().args(args).assert().success().get_output().stdout.clone();
    let b = levyq().env("LEVYQ_THREADS", "1").args(args).assert().success().get_output().stdout.clone();
    assert_eq!(a, b);
}
