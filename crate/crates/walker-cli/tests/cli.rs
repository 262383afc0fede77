//! End-to-end tests of the `walker` binary: every JSON output is validated
//! against its schema under docs/schemas, numbers are cross-checked against
//! the library, and exit codes / file outputs / the dimension guard are
//! exercised through real process invocations.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use walker_core::{
    evolve, fi_complete_graph_closed, qfi_bipartite_max, qfi_pure, Preparation,
};

fn walker(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_walker"));
    cmd.args(args);
    cmd
}

fn run_ok(args: &[&str]) -> String {
    let out = walker(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "walker {args:?} exited {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).expect("stdout is JSON")
}

fn run_fail(args: &[&str]) -> Output {
    let out = walker(args).output().expect("binary runs");
    assert!(!out.status.success(), "walker {args:?} unexpectedly succeeded");
    out
}

fn schemas_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .canonicalize()
        .expect("schemas directory exists")
}

/// Builds a validator for one of the shipped schemas, resolving relative
/// `$ref`s (e.g. graph_spec) against the schemas directory.
fn validator(name: &str) -> jsonschema::Validator {
    let dir = schemas_dir();
    let text = std::fs::read_to_string(dir.join(name)).expect("schema file readable");
    let schema: Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::options()
        .with_base_uri(format!("file://{}/", dir.display()))
        .build(&schema)
        .unwrap_or_else(|e| panic!("schema {name} does not compile: {e}"))
}

fn assert_valid(name: &str, instance: &Value) {
    let violations: Vec<String> = validator(name)
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(violations.is_empty(), "{name} violations: {violations:#?}");
}

#[test]
fn spectrum_json_matches_schema_and_numerical_source() {
    let closed = run_json(&["spectrum", "--family", "cycle", "--n", "8", "--gamma", "0.75"]);
    assert_valid("spectrum_output.schema.json", &closed);
    assert_eq!(closed["source"], "closed_form");
    assert_eq!(closed["n"], 8);

    let values: Vec<f64> = closed["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]), "eigenvalues not ascending");
    let mult_sum: u64 =
        closed["multiplicities"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(mult_sum, 8);

    let numerical = run_json(&[
        "spectrum", "--family", "cycle", "--n", "8", "--gamma", "0.75", "--numerical",
    ]);
    assert_valid("spectrum_output.schema.json", &numerical);
    assert_eq!(numerical["source"], "numerical");
    for (a, b) in values.iter().zip(numerical["eigenvalues"].as_array().unwrap()) {
        assert!((a - b.as_f64().unwrap()).abs() <= 1e-9);
    }
}

#[test]
fn spectrum_csv_writes_eigenvector_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.csv");
    let out = walker(&[
        "spectrum",
        "--family",
        "complete-bipartite",
        "--p",
        "2",
        "--q",
        "3",
        "--gamma",
        "0.6",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ])
    .output()
    .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("wrote"));

    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "position,e0,e1,e2,e3,e4");
    assert_eq!(lines.len(), 6);
    for (row, line) in lines[1..].iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], (row + 1).to_string());
        assert_eq!(cells.len(), 6);
        assert!(cells[1..].iter().all(|c| c.ends_with('j')));
    }
}

#[test]
fn evolve_output_is_normalized() {
    let out = run_json(&[
        "evolve", "--family", "complete", "--n", "4", "--gamma", "1.0", "--t", "0.3", "--prep",
        "uniform-position",
    ]);
    assert_valid("evolve_output.schema.json", &out);
    assert!((out["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let total: f64 = out["position_probabilities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(out["state"].as_array().unwrap().len(), 4);
    assert_eq!(out["dstate"].as_array().unwrap().len(), 4);
}

#[test]
fn qfi_matches_library_and_reports_oracle_gap() {
    let out = run_json(&[
        "qfi", "--family", "star", "--n", "9", "--gamma", "0.8", "--t", "1.7", "--phi", "opt",
        "--oracle",
    ]);
    assert_valid("qfi_output.schema.json", &out);
    let expected = qfi_bipartite_max(1, 8, 0.8, 1.7).unwrap();
    assert!((out["qfi"].as_f64().unwrap() - expected).abs() <= 1e-10 * expected);
    assert!(out["oracle_relative_gap"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn fi_csv_round_trips_against_closed_form() {
    let csv = run_ok(&[
        "fi", "--family", "complete", "--n", "8", "--gamma", "0.9", "--t", "1.3", "--first-m",
        "3", "--format", "csv",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n,gamma,t,m,fi,qfi,eta");
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cells[..5], &["complete", "8", "0.9", "1.3", "3"]);

    let fi: f64 = cells[5].parse().unwrap();
    let qfi: f64 = cells[6].parse().unwrap();
    let eta: f64 = cells[7].parse().unwrap();
    let closed = fi_complete_graph_closed(8, 3, 0.9, 1.3).unwrap();
    assert!((fi - closed).abs() <= 1e-9 * closed);
    assert!((qfi - 64.0 * 1.3 * 1.3).abs() <= 1e-9 * qfi);
    assert!((eta - fi / qfi).abs() <= 1e-12);
}

#[test]
fn fi_json_matches_report_schema() {
    let out = run_json(&[
        "fi", "--family", "hypercube", "--d", "3", "--gamma", "1.1", "--t", "0.6", "--face",
        "2", "--shots", "500",
    ]);
    assert_valid("estimation_report.schema.json", &out);
    assert_eq!(out["n"], 8);
    assert_eq!(out["shots"], 500);
    assert!(out["fi"].as_f64().unwrap() > 0.0);
}

#[test]
fn star_central_node_is_equivalent_to_complete_measurement() {
    let base = [
        "fi", "--family", "star", "--n", "9", "--gamma", "0.8", "--t", "1.2", "--phi", "opt",
    ];
    let central = run_json(&[&base[..], &["--central"]].concat());
    let complete = run_json(&[&base[..], &["--complete"]].concat());
    let a = central["fi"].as_f64().unwrap();
    let b = complete["fi"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "central {a} vs complete {b}");
}

#[test]
fn efficiency_reports_the_time_optimum() {
    let out = run_json(&[
        "efficiency",
        "--family",
        "cycle",
        "--n",
        "8",
        "--gamma",
        "1.0",
        "--t",
        "0.39269908169872414",
        "--parity",
        "2,4",
    ]);
    assert_valid("efficiency_output.schema.json", &out);
    // all even nodes monitored: a unit-efficiency segment, optimum max(1/2, 1)
    assert!((out["eta"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert!((out["max_eta_over_t"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn optimize_prep_search_confirms_the_closed_form() {
    let out = run_json(&[
        "optimize-prep",
        "--family",
        "complete-bipartite",
        "--p",
        "2",
        "--q",
        "3",
        "--gamma",
        "0.7",
        "--t",
        "1.1",
        "--restarts",
        "4",
        "--seed",
        "3",
    ]);
    assert_valid("optimize_prep_output.schema.json", &out);
    assert!((out["search_ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert_eq!(out["closed_form"]["pair"], serde_json::json!([0, 4]));
}

#[test]
fn optimize_n_reports_asymptotic_and_exact_optima() {
    let out = run_json(&[
        "optimize-n", "--gamma", "1.0", "--regime", "small-time", "--t", "0.01", "--n-min",
        "2", "--n-max", "30",
    ]);
    assert_valid("optimize_n_output.schema.json", &out);
    assert!((out["n_opt_asymptotic"].as_f64().unwrap() - 6.82842712474619).abs() <= 1e-9);
    assert_eq!(out["argmax"]["n"], 7);

    let unbounded = run_json(&["optimize-n", "--gamma", "1.0", "--regime", "large-time"]);
    assert_valid("optimize_n_output.schema.json", &unbounded);
    assert_eq!(unbounded["n_opt_asymptotic"], "unbounded");
}

#[test]
fn estimate_is_reproducible_and_writes_the_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("estimates.csv");
    let args = [
        "estimate",
        "--family",
        "complete",
        "--n",
        "4",
        "--gamma-true",
        "0.5",
        "--t",
        "0.19634954084936207",
        "--shots",
        "500",
        "--reps",
        "20",
        "--seed",
        "9",
        "--bracket",
        "0.1,0.9",
        "--out",
        path.to_str().unwrap(),
    ];
    let first = run_ok(&args);
    let summary: Value = serde_json::from_str(&first).unwrap();
    assert_valid("estimate_summary.schema.json", &summary);
    assert_eq!(summary["reps"], 20);
    let mean = summary["mean"].as_f64().unwrap();
    assert!((mean - 0.5).abs() < 0.1, "mean {mean} far from the true value");

    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rep,gamma_hat");
    assert_eq!(lines.len(), 21);

    // bit-level reproducibility: identical bytes on a second run
    assert_eq!(first, run_ok(&args));
}

#[test]
fn sweep_runs_a_shipped_config_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let config = schemas_dir().join("../sweeps/hypercube_qfi_vs_d.json");
    run_ok(&["sweep", "--config", config.to_str().unwrap(), "--out", path.to_str().unwrap()]);

    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "d,qfi,error");
    assert_eq!(lines.len(), 11);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        let d: f64 = cells[0].parse().unwrap();
        let qfi: f64 = cells[1].parse().unwrap();
        assert!((qfi - 4.0 * d * d).abs() <= 1e-10 * qfi);
    }
}

#[test]
fn sweep_json_output_matches_the_rows_schema() {
    let config_path = schemas_dir().join("../sweeps/hypercube_qfi_vs_d.json");
    let mut config: Value =
        serde_json::from_str(&std::fs::read_to_string(config_path).unwrap()).unwrap();
    config["format"] = Value::String("json".into());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();

    let rows = run_json(&["sweep", "--config", path.to_str().unwrap()]);
    assert_valid("sweep_rows.schema.json", &rows);
    assert_eq!(rows.as_array().unwrap().len(), 10);
    assert_eq!(rows[0]["d"], 1.0);
    assert!(rows[0]["error"].is_null());
}

#[test]
fn shipped_sweep_configs_validate_against_the_schema() {
    let sweeps = schemas_dir().join("../sweeps");
    let mut count = 0;
    for entry in std::fs::read_dir(sweeps).unwrap() {
        let path = entry.unwrap().path();
        let config: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{path:?} is not JSON: {e}"));
        assert_valid("sweep_config.schema.json", &config);
        count += 1;
    }
    assert_eq!(count, 4);
}

#[test]
fn schema_validation_rejects_malformed_documents() {
    // negative control: the validators must actually bite
    let v = validator("graph_spec.schema.json");
    assert!(v.is_valid(&serde_json::json!({"family": "complete", "n": 5})));
    assert!(!v.is_valid(&serde_json::json!({"family": "complete", "n": 0})));
    assert!(!v.is_valid(&serde_json::json!({"family": "complete"})));
    assert!(!v.is_valid(&serde_json::json!({"family": "triangle", "n": 3})));

    let v = validator("sweep_config.schema.json");
    let mut config: Value = serde_json::from_str(
        &std::fs::read_to_string(schemas_dir().join("../sweeps/complete_qfi_vs_n.json"))
            .unwrap(),
    )
    .unwrap();
    assert!(v.is_valid(&config));
    config["quantities"] = serde_json::json!(["entropy"]);
    assert!(!v.is_valid(&config));
}

#[test]
fn preparation_files_are_accepted() {
    let prep = Preparation::energy_pair(6, 0, 5, 0.0).unwrap();
    let text = prep.to_json();
    assert_valid("preparation.schema.json", &serde_json::from_str(&text).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prep.json");
    std::fs::write(&path, &text).unwrap();

    let out = run_json(&[
        "qfi", "--family", "cycle", "--n", "6", "--gamma", "1.0", "--t", "0.8", "--prep",
        path.to_str().unwrap(),
    ]);
    let spec = walker_core::GraphSpec::Cycle { n: 6 };
    let expected = qfi_pure(&evolve(&spec, 1.0, &prep, 0.8).unwrap()).unwrap();
    assert!((out["qfi"].as_f64().unwrap() - expected).abs() <= 1e-10 * expected.max(1.0));
    assert!(out["prep"].as_str().unwrap().starts_with("file:"));
}

#[test]
fn usage_errors_exit_with_code_2() {
    // missing required --gamma
    let out = run_fail(&["qfi", "--family", "complete", "--n", "4", "--t", "1.0"]);
    assert_eq!(out.status.code(), Some(2));

    // conflicting measurement flags
    let out = run_fail(&[
        "fi", "--family", "star", "--n", "5", "--gamma", "1.0", "--t", "1.0", "--complete",
        "--central",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_code_1() {
    // graph validation failure
    let out = run_fail(&["spectrum", "--family", "complete", "--n", "1", "--gamma", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // circulant graphs only support spectra
    let out = run_fail(&[
        "qfi", "--family", "circulant", "--n", "8", "--couplings", "1,0,1,0.5", "--gamma",
        "1.0", "--t", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectrum computation"));

    // graph flags that don't belong to the family
    let out = run_fail(&["spectrum", "--family", "cycle", "--n", "6", "--d", "2", "--gamma", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dimension_guard_reads_the_environment_per_invocation() {
    let args = ["spectrum", "--family", "complete", "--n", "16", "--gamma", "1.0"];
    assert!(walker(&args).output().unwrap().status.success());

    let out = walker(&args).env("WALKER_MAX_DIM", "8").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16"));

    let out = walker(&args).env("WALKER_MAX_DIM", "17").output().unwrap();
    assert!(out.status.success());
}
