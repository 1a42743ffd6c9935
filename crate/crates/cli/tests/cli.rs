//! End-to-end checks of the experiment runner and the binary.

use std::fs;
use std::process::Command;

use mompc_cli::config::parse_config_str;
use mompc_cli::experiment::run_experiment;
use mompc_cli::RunOutcome;

#[test]
fn run_writes_all_artifacts() {
    let cfg = parse_config_str(
        r#"{"benchmark": "cstr2", "N": 5, "K": 100, "seed": 3,
            "first_selection": {"type": "rule", "rule": "ideal"},
            "front_at": [0]}"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_experiment(&cfg, dir.path()).unwrap();

    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().collect();
    assert_eq!(rows.len(), 102, "header + 101 rows");
    assert!(rows[0].starts_with("k,x1,x2,u1,"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let j1 = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "j1_performance")
        .expect("j1 check present");
    assert_eq!(j1["status"], "pass");

    let front = fs::read_to_string(dir.path().join("front_k0.csv")).unwrap();
    assert!(front.lines().count() >= 3, "at least two front points");

    let plots = fs::read_to_string(dir.path().join("plots.gp")).unwrap();
    assert!(plots.contains("trace.csv"));
    assert!(plots.contains("front_k0.csv"));

    // Averaged checks cannot settle within 100 steps, so the outcome is
    // a failed check, not a solver failure.
    assert_eq!(artifacts.outcome, RunOutcome::ChecksFailed);
}

#[test]
fn front_artifact_rows_are_mutually_nondominated() {
    let cfg = parse_config_str(
        r#"{"benchmark": "cstr2", "N": 5, "K": 2, "seed": 3, "front_budget": 12, "front_at": [0]}"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path()).unwrap();
    let front = fs::read_to_string(dir.path().join("front_k0.csv")).unwrap();
    let points: Vec<(f64, f64)> = front
        .lines()
        .skip(1)
        .map(|row| {
            let cells: Vec<&str> = row.split(',').collect();
            (cells[1].parse().unwrap(), cells[2].parse().unwrap())
        })
        .collect();
    assert!(points.len() >= 2);
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            if i != j {
                let dominates = a.0 <= b.0 + 1e-6 && a.1 <= b.1 + 1e-6
                    && (a.0 < b.0 - 1e-6 || a.1 < b.1 - 1e-6);
                assert!(!dominates, "row {i} dominates row {j}");
            }
        }
    }
}

#[test]
fn binary_reports_config_errors_with_exit_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.json");
    fs::write(&cfg_path, r#"{"benchmark": "cstr2", "N": 1, "K": 10}"#).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mompc"))
        .args(["run", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("N must be at least 2"), "{stderr}");
}

#[test]
fn binary_runs_an_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("ok.json");
    fs::write(
        &cfg_path,
        r#"{"benchmark": "econ", "N": 10, "K": 20, "seed": 3}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_mompc"))
        .args([
            "run",
            cfg_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(out_dir.join("trace.csv").exists());
    assert!(out_dir.join("report.json").exists());
}

#[test]
fn front_subcommand_rejects_iterations_beyond_k() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"benchmark": "econ", "N": 10, "K": 5}"#).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_mompc"))
        .args(["front", cfg_path.to_str().unwrap(), "--at-iteration", "9"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}
