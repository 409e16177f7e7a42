use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn onebit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit")).args(args).output().unwrap()
}

fn results(out: &Output) -> Value {
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    report["results"].clone()
}

fn matrix_file(dir: &tempfile::TempDir, name: &str, json: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn entropy_command() {
    let out = onebit(&["entropy", "--dist", "0.5,0.5", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(results(&out)["entropy"], 1.0);

    let out = onebit(&["entropy", "--dist", "1,0", "--alpha", "2"]);
    assert_eq!(results(&out)["entropy"], 0.0);

    let out = onebit(&["entropy", "--dist", "0.5,0.6", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("distribution sum 1.1"));
    assert!(out.stdout.is_empty());
}

#[test]
fn report_envelope() {
    let out = onebit(&["counting", "--n-max", "3", "--m", "3", "--r-max", "2"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "counting");
    assert_eq!(report["seed"], 0);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["parameters"]["n_max"], 3);
    assert_eq!(report["results"]["table"][1]["k"], 8);
}

#[test]
fn invariance_scan_command() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = onebit(&[
        "invariance-scan", "--alphas", "1,2,3", "--n-states", "1000", "--n-maps", "100", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = results(&out)["rows"].as_array().unwrap().clone();
    let dev = |k: usize| rows[k]["max_deviation"].as_f64().unwrap();
    assert!(dev(0) >= 0.19);
    assert!(dev(1) <= 1e-9);
    // the normalized cubic measure coincides with the quadratic one on binary
    // distributions, so it is rotation invariant as well
    assert!(dev(2) <= 1e-9);

    let table = fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("alpha,max_deviation,argmax_state_id,argmax_map_id"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1.0000000000000000e0");
    assert_eq!(first[1].parse::<f64>().unwrap(), dev(0));
}

#[test]
fn identity_family_scan_is_zero() {
    let out = onebit(&["invariance-scan", "--alphas", "2", "--n-states", "50", "--family", "identity"]);
    assert_eq!(results(&out)["rows"][0]["max_deviation"], 0.0);
}

#[test]
fn unwritable_output_exits_3() {
    let out = onebit(&["--out", "/nonexistent-dir/report.json", "counting"]);
    assert_eq!(out.status.code(), Some(3));
    let out = onebit(&["malus", "--csv", "/nonexistent-dir/malus.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn positivity_command() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = matrix_file(&dir, "mixed.json", r#"{"n": 2, "re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}"#);
    let out = onebit(&["positivity", "--matrix", &mixed, "--strategy", "eigen-directed"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(results(&out)["positive"], true);
    assert_eq!(results(&out)["witness"], Value::Null);

    let neg = matrix_file(&dir, "neg.json", r#"{"n": 2, "re": [[0.5, 0.6], [0.6, 0.5]], "im": [[0, 0], [0, 0]]}"#);
    let out = onebit(&["positivity", "--matrix", &neg]);
    assert_eq!(out.status.code(), Some(1));
    let r = results(&out);
    assert_eq!(r["positive"], false);
    assert_eq!(r["oracle"]["positive"], false);
    assert_eq!((r["witness"]["i"].clone(), r["witness"]["j"].clone()), (0.into(), 1.into()));
    assert!((r["witness"]["minor"].as_f64().unwrap() + 0.11).abs() < 1e-12);

    let trace = matrix_file(&dir, "trace.json", r#"{"n": 2, "re": [[0.45, 0], [0, 0.45]], "im": [[0, 0], [0, 0]]}"#);
    let out = onebit(&["positivity", "--matrix", &trace]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    let herm = matrix_file(&dir, "herm.json", r#"{"n": 2, "re": [[0.5, 0.1], [0.2, 0.5]], "im": [[0, 0], [0, 0]]}"#);
    let out = onebit(&["positivity", "--matrix", &herm]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));

    let out = onebit(&["positivity", "--matrix", "/nonexistent-dir/m.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counting_command() {
    let out = onebit(&["counting"]);
    assert_eq!(results(&out)["consistent"], serde_json::json!([{ "m": 3, "r": 2 }]));

    let out = onebit(&["counting", "--n-max", "20", "--m", "3", "--r-max", "2"]);
    for row in results(&out)["table"].as_array().unwrap() {
        let n = row["n"].as_u64().unwrap();
        assert_eq!(row["k"].as_u64().unwrap(), n * n - 1);
    }
}

#[test]
fn search_preservers_command() {
    let out = onebit(&["search-preservers", "--alpha", "2", "--budget", "10000", "--seed", "1"]);
    let r = results(&out);
    let candidates = r["candidates"].as_array().unwrap();
    assert!(candidates.iter().any(|c| c["residual"].as_f64().unwrap() <= 1e-6 && c["permutation_like"] == false));
    assert_eq!(r["all_candidates_permutation_like"], false);

    let out = onebit(&["search-preservers", "--alpha", "3", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(results(&out)["candidates"], serde_json::json!([]));
}

#[test]
fn malus_command() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("malus.csv");
    let out = onebit(&["malus", "--steps", "1000", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(results(&out)["max_abs_diff"].as_f64().unwrap() <= 1e-12);
    let table = fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().next(), Some("theta,malus,rotated_axis,abs_diff"));
    assert_eq!(table.lines().count(), 1001);
}

#[test]
fn invalid_arguments_exit_2() {
    let out = onebit(&["invariance-scan", "--alpha-steps", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = onebit(&["entropy", "--dist", "0.5,0.5", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}
