//! End-to-end tests of the command-line binary: exit codes, artifact layout
//! and byte-level determinism of the generated files.

use std::path::Path;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logstrain"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const EVAL_SHEARED_PLASTIC: &str = r#"{
    "model": {
        "family": "exponentiated_hencky",
        "n": 2, "mu": 1.0, "kappa": 0.0,
        "plastic": {"variant": "additive_log", "entries": [-2.0, 0.0, 0.0, 2.0]}
    },
    "f": [1.0, 0.0, 0.0, 1.0]
}"#;

#[test]
fn eval_reports_known_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eval.json", EVAL_SHEARED_PLASTIC);
    let out = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    // at F = 1 the elastic log strain is minus the plastic one, with
    // squared deviatoric norm 8, so the isochoric energy is exp(8)
    let energy = summary["energy"].as_f64().unwrap();
    let expected = 8.0_f64.exp();
    assert!(
        (energy - expected).abs() <= 1e-9 * expected,
        "energy {energy} vs {expected}"
    );
}

#[test]
fn missing_config_exits_2() {
    let out = run(&["eval"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(4), "unreadable file is an I/O error");
}

#[test]
fn unknown_family_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "eval.json",
        r#"{"model": {"family": "mooney_rivlin", "n": 2, "mu": 1.0}, "f": [1.0, 0.0, 0.0, 1.0]}"#,
    );
    let out = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonpositive_determinant_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "eval.json",
        r#"{"model": {"family": "quadratic_hencky", "n": 2, "mu": 1.0, "kappa": 1.0},
            "f": [1.0, 0.0, 0.0, -1.0]}"#,
    );
    let out = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_directory_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    // a file where a directory is required makes create_dir_all fail
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let out_dir = blocker.join("sub");
    let out = run(&["counterexample", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn counterexample_artifacts_and_determinism() {
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["counterexample", "--out", dir.path().to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(dir.path().join("counterexample.csv")).unwrap();
        let summary =
            std::fs::read_to_string(dir.path().join("counterexample_summary.json")).unwrap();
        (csv, summary)
    };
    let (csv_a, summary_a) = run_once();
    let (csv_b, summary_b) = run_once();
    assert_eq!(csv_a, csv_b, "CSV must be byte-identical between runs");
    assert_eq!(summary_a, summary_b, "summary must be byte-identical between runs");

    let mut lines = csv_a.lines();
    assert_eq!(lines.next(), Some("t,h_closed_form,h_direct"));
    assert_eq!(lines.count(), 401, "default sampling count");
    let summary: serde_json::Value = serde_json::from_str(&summary_a).unwrap();
    assert_eq!(summary["closed_form_convexity"]["verdict"], "nonconvex");
    assert_eq!(summary["direct_convexity"]["verdict"], "nonconvex");
}

#[test]
fn too_few_samples_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ce.json",
        r#"{"a": -2.0, "b": 0.0, "t_min": -1.0, "t_max": 1.0, "samples": 2}"#,
    );
    let out = run(&[
        "counterexample",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_single_elliptic_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scan.json",
        r#"{
            "model": {"family": "quadratic_hencky", "n": 2, "mu": 1.0, "kappa": 1.0},
            "resolution": 32,
            "points": [[1.0, 0.0, 0.0, 1.0]]
        }"#,
    );
    let out = run(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("scan_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["aggregate_verdict"], "elliptic");
}

#[test]
fn elastic_path_keeps_multiplier_zero() {
    let dir = tempfile::tempdir().unwrap();
    let steps: Vec<String> = (0..=10)
        .map(|i| {
            let t = 0.02 * i as f64;
            format!(r#"{{"t": {t}, "f": [1.0, {t}, 0.0, 1.0]}}"#)
        })
        .collect();
    let cfg = write_config(
        dir.path(),
        "path.json",
        &format!(
            r#"{{
                "formulation": "additive_log",
                "family": "quadratic_hencky",
                "n": 2, "mu": 1.0, "kappa": 1.0,
                "sigma_y": 100.0,
                "steps": [{}]
            }}"#,
            steps.join(",")
        ),
    );
    let out = run(&[
        "path",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("path.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lp = header.iter().position(|&h| h == "lambda_plus").unwrap();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let value: f64 = fields[lp].parse().unwrap();
        assert_eq!(value, 0.0, "elastic path must not accumulate plastic flow");
    }
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("path_summary.json")).unwrap(),
    )
    .unwrap();
    let entries = summary["final_plastic_state"]["entries"].as_array().unwrap();
    assert!(entries.iter().all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn compare_requires_two_formulations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "compare.json",
        r#"{
            "formulations": ["additive_log"],
            "family": "quadratic_hencky",
            "n": 2, "mu": 1.0, "kappa": 1.0, "sigma_y": 0.3,
            "steps": [{"t": 0.0, "f": [1.0, 0.0, 0.0, 1.0]}]
        }"#,
    );
    let out = run(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_writes_per_formulation_columns() {
    let dir = tempfile::tempdir().unwrap();
    let steps: Vec<String> = (0..=8)
        .map(|i| {
            let t = 0.1 * i as f64;
            format!(r#"{{"t": {t}, "f": [1.0, {t}, 0.0, 1.0]}}"#)
        })
        .collect();
    let cfg = write_config(
        dir.path(),
        "compare.json",
        &format!(
            r#"{{
                "formulations": ["additive_log", "multiplicative"],
                "family": "quadratic_hencky",
                "n": 2, "mu": 1.0, "kappa": 1.0,
                "sigma_y": 0.3,
                "steps": [{}]
            }}"#,
            steps.join(",")
        ),
    );
    let out = run(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for column in [
        "additive_log_plastic_norm",
        "multiplicative_plastic_norm",
        "additive_log_lambda_plus",
        "multiplicative_lambda_plus",
    ] {
        assert!(header.contains(column), "missing column {column} in {header}");
    }
}
