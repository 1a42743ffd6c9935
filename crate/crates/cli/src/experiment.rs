//! Executes experiments and writes their artifacts.

use std::path::{Path, PathBuf};

use mompc_core::diagnostics::{self, DiagnosticsConfig};
use mompc_core::error::Error;
use mompc_core::math;
use mompc_core::mpc::{run_closed_loop, ClosedLoopTrace, LoopStatus, SelectionRule};
use mompc_core::problems::BenchmarkSpec;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::output;
use crate::{CliError, RunOutcome};

/// Radius of the equilibrium neighborhood used for the steps-to-
/// convergence summary.
const CONVERGENCE_EPS: f64 = 1e-2;

pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub trace: ClosedLoopTrace,
    pub spec: BenchmarkSpec,
    pub out_dir: PathBuf,
}

fn map_core_error(e: Error) -> CliError {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidModel(_)
        | Error::InvalidObjectives(_)
        | Error::DimensionMismatch { .. }
        | Error::ObjectiveIndexOutOfRange { .. } => CliError::Config(format!("{e}")),
        other => CliError::Solver(format!("{other}")),
    }
}

/// Runs one closed loop and writes `trace.csv`, `front_k<j>.csv`,
/// `report.json`, and `plots.gp` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunArtifacts, CliError> {
    let spec = cfg.benchmark_spec()?;
    let x0 = cfg.initial_state(&spec);
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    log::info!(
        "running {} N={} K={} from {:?}",
        spec.name,
        cfg.mpc.horizon,
        cfg.mpc.iterations,
        x0
    );
    let trace =
        run_closed_loop(&spec.model, &spec.objectives, &x0, &cfg.mpc).map_err(map_core_error)?;

    output::write_trace_csv(&out_dir.join("trace.csv"), &trace)?;
    let mut front_files = Vec::new();
    for (k, front) in &trace.fronts {
        let name = format!("front_k{k}.csv");
        output::write_front_csv(&out_dir.join(&name), front)?;
        front_files.push((*k, name));
    }

    let diag_cfg = DiagnosticsConfig {
        avg_tol: cfg.avg_tol,
        endpoint_tol: cfg.mpc.solver.feasibility_tol,
        envelope: cfg.envelope.clone(),
        ..DiagnosticsConfig::default()
    };
    let report = diagnostics::run_all(&spec.model, &spec.objectives, &trace, &diag_cfg);
    output::write_report(&out_dir.join("report.json"), spec.name, &trace, &report)?;
    output::write_plot_script(
        &out_dir.join("plots.gp"),
        &cfg.figures,
        &trace,
        &front_files,
        spec.objectives.equilibrium_cost(),
    )?;

    let outcome = match (&trace.status, report.all_passed()) {
        (LoopStatus::Aborted { .. }, _) => RunOutcome::SolverFailure,
        (LoopStatus::Completed, false) => RunOutcome::ChecksFailed,
        (LoopStatus::Completed, true) => RunOutcome::AllPassed,
    };
    Ok(RunArtifacts {
        outcome,
        trace,
        spec,
        out_dir: out_dir.to_path_buf(),
    })
}

/// First iteration at which the state enters (and is first observed in)
/// the `CONVERGENCE_EPS` neighborhood of the equilibrium.
fn steps_to_neighborhood(trace: &ClosedLoopTrace, xe: &[f64]) -> Option<usize> {
    (0..=trace.len()).find(|&k| math::dist2(trace.state(k), xe) <= CONVERGENCE_EPS)
}

/// Runs the same experiment once per selection rule (identical first
/// selection), writing per-rule artifacts plus a side-by-side CSV and a
/// summary.
pub fn compare_rules(
    cfg: &ExperimentConfig,
    rules: &[(String, SelectionRule)],
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    if rules.is_empty() {
        return Err(CliError::Config("no rules to compare".into()));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    let mut runs: Vec<(String, RunArtifacts)> = Vec::new();
    for (name, rule) in rules {
        let mut sub = cfg.clone();
        sub.mpc.subsequent_rule = rule.clone();
        let artifacts = run_experiment(&sub, &out_dir.join(format!("rule_{name}")))?;
        runs.push((name.clone(), artifacts));
    }

    let spec = &runs[0].1.spec;
    let xe = spec.model.equilibrium_state();
    let s = spec.objectives.num_objectives();
    let k_max = runs.iter().map(|(_, a)| a.trace.len()).max().unwrap();

    // Side-by-side CSV: distance to the equilibrium and cumulative costs
    // per rule.
    let mut header: Vec<String> = vec!["k".into()];
    for (name, _) in &runs {
        header.push(format!("dist_{name}"));
        for i in 1..=s {
            header.push(format!("cum_j{i}_{name}"));
        }
    }
    let mut text = header.join(",") + "\n";
    let cums: Vec<Vec<Vec<f64>>> = runs
        .iter()
        .map(|(_, a)| (0..s).map(|i| a.trace.cumulative(i)).collect())
        .collect();
    for k in 0..=k_max {
        let mut row: Vec<String> = vec![k.to_string()];
        for ((_, a), cum) in runs.iter().zip(&cums) {
            if k <= a.trace.len() {
                row.push(format!("{:.16e}", math::dist2(a.trace.state(k), xe)));
                for c in cum.iter() {
                    row.push(format!("{:.16e}", c[k]));
                }
            } else {
                row.push(format!("{:.16e}", f64::NAN));
                for _ in 0..s {
                    row.push(format!("{:.16e}", f64::NAN));
                }
            }
        }
        text.push_str(&(row.join(",") + "\n"));
    }
    let cmp_path = out_dir.join("comparison.csv");
    std::fs::write(&cmp_path, text).map_err(|e| CliError::Io(format!("{}: {e}", cmp_path.display())))?;

    let summary: Vec<serde_json::Value> = runs
        .iter()
        .map(|(name, a)| {
            let finals: Vec<f64> = (0..s).map(|i| a.trace.cumulative(i)[a.trace.len()]).collect();
            json!({
                "rule": name,
                "iterations": a.trace.len(),
                "final_cumulative": finals,
                "final_distance": math::dist2(a.trace.state(a.trace.len()), xe),
                "steps_to_neighborhood": steps_to_neighborhood(&a.trace, xe),
                "neighborhood_radius": CONVERGENCE_EPS,
            })
        })
        .collect();
    let doc = json!({
        "schema_version": 1,
        "benchmark": spec.name,
        "horizon": cfg.mpc.horizon,
        "rules": summary,
    });
    let sum_path = out_dir.join("summary.json");
    std::fs::write(
        &sum_path,
        serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n",
    )
    .map_err(|e| CliError::Io(format!("{}: {e}", sum_path.display())))?;

    Ok(runs
        .iter()
        .map(|(_, a)| a.outcome)
        .max_by_key(|o| match o {
            RunOutcome::AllPassed => 0,
            RunOutcome::ChecksFailed => 1,
            RunOutcome::SolverFailure => 2,
        })
        .unwrap())
}
