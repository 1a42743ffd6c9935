//! File artifacts: CSV traces and fronts, the JSON report, and the
//! generated gnuplot script.
//!
//! CSVs use a header row, comma separation, and 17 significant digits so
//! that reruns are byte-comparable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use mompc_core::diagnostics::PerformanceReport;
use mompc_core::mpc::{AlgorithmVariant, ClosedLoopTrace, LoopStatus};
use mompc_core::solver::FrontApproximation;

use crate::CliError;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: std::io::Error, what: &Path) -> CliError {
    CliError::Io(format!("{}: {e}", what.display()))
}

/// One row per iteration plus a final row carrying the terminal state
/// and the total cumulative/averaged costs.
pub fn write_trace_csv(path: &Path, trace: &ClosedLoopTrace) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(e, path))?;
    let mut w = BufWriter::new(file);
    let n = trace.steps[0].state.len();
    let m = trace.steps[0].input.len();
    let s = trace.steps[0].stage_costs.len();

    let mut header: Vec<String> = vec!["k".into()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|i| format!("u{i}")));
    header.extend((1..=s).map(|i| format!("l{i}")));
    header.extend((1..=s).map(|i| format!("chosen_j{i}")));
    header.extend((1..=s).map(|i| format!("comp_j{i}")));
    header.extend((1..=s).map(|i| format!("cum_j{i}")));
    header.extend((1..=s).map(|i| format!("avg_j{i}")));
    header.push("v".into());
    header.push("terminal_dist".into());
    header.extend((1..=s).map(|i| format!("slack_j{i}")));
    header.push("kkt".into());
    header.push("violation".into());
    header.push("fallback".into());
    writeln!(w, "{}", header.join(",")).map_err(|e| io_err(e, path))?;

    let cums: Vec<Vec<f64>> = (0..s).map(|i| trace.cumulative(i)).collect();
    let nan = f64::NAN;

    for step in &trace.steps {
        let k = step.k;
        let mut row: Vec<String> = vec![k.to_string()];
        row.extend(step.state.iter().map(|x| fmt(*x)));
        row.extend(step.input.iter().map(|x| fmt(*x)));
        row.extend(step.stage_costs.iter().map(|x| fmt(*x)));
        row.extend(step.chosen.cost.iter().map(|x| fmt(*x)));
        match &step.comparison_cost {
            Some(c) => row.extend(c.iter().map(|x| fmt(*x))),
            None => row.extend((0..s).map(|_| fmt(nan))),
        }
        row.extend((0..s).map(|i| fmt(cums[i][k])));
        if k == 0 {
            row.extend((0..s).map(|_| fmt(nan)));
        } else {
            row.extend((0..s).map(|i| fmt(cums[i][k] / k as f64)));
        }
        row.push(fmt(step.rotated_value.unwrap_or(nan)));
        row.push(fmt(step.predicted_terminal_distance));
        match &step.comparison_cost {
            Some(c) => row.extend(
                c.iter()
                    .zip(&step.chosen.cost)
                    .map(|(comp, chosen)| fmt(comp - chosen)),
            ),
            None => row.extend((0..s).map(|_| fmt(nan))),
        }
        row.push(fmt(step.chosen.kkt_residual));
        row.push(fmt(step.chosen.constraint_violation));
        row.push((step.fallback as u8).to_string());
        writeln!(w, "{}", row.join(",")).map_err(|e| io_err(e, path))?;
    }

    // Final row: terminal state and totals only.
    let k = trace.len();
    let mut row: Vec<String> = vec![k.to_string()];
    row.extend(trace.final_state.iter().map(|x| fmt(*x)));
    row.extend((0..m).map(|_| fmt(nan)));
    row.extend((0..s).map(|_| fmt(nan)));
    row.extend((0..2 * s).map(|_| fmt(nan)));
    row.extend((0..s).map(|i| fmt(cums[i][k])));
    row.extend((0..s).map(|i| fmt(cums[i][k] / k as f64)));
    row.push(fmt(nan));
    row.push(fmt(nan));
    row.extend((0..s).map(|_| fmt(nan)));
    row.push(fmt(nan));
    row.push(fmt(nan));
    row.push(fmt(nan));
    writeln!(w, "{}", row.join(",")).map_err(|e| io_err(e, path))?;
    w.flush().map_err(|e| io_err(e, path))
}

pub fn write_front_csv(path: &Path, front: &FrontApproximation) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(e, path))?;
    let mut w = BufWriter::new(file);
    let s = front
        .points
        .first()
        .map(|p| p.cost.len())
        .unwrap_or_default();
    let mut header: Vec<String> = vec!["idx".into()];
    header.extend((1..=s).map(|i| format!("j{i}")));
    header.push("tag".into());
    header.push("kkt".into());
    header.push("violation".into());
    writeln!(w, "{}", header.join(",")).map_err(|e| io_err(e, path))?;
    for (idx, point) in front.points.iter().enumerate() {
        let mut row: Vec<String> = vec![idx.to_string()];
        row.extend(point.cost.iter().map(|x| fmt(*x)));
        row.push(point.tag.label());
        row.push(fmt(point.kkt_residual));
        row.push(fmt(point.constraint_violation));
        writeln!(w, "{}", row.join(",")).map_err(|e| io_err(e, path))?;
    }
    w.flush().map_err(|e| io_err(e, path))
}

fn f64_json(x: Option<f64>) -> Value {
    match x {
        Some(v) if v.is_finite() => json!(v),
        _ => Value::Null,
    }
}

/// Versioned JSON report: run metadata, loop status, and one entry per
/// diagnostic check.
pub fn write_report(
    path: &Path,
    benchmark: &str,
    trace: &ClosedLoopTrace,
    report: &PerformanceReport,
) -> Result<(), CliError> {
    let algorithm = match trace.variant {
        AlgorithmVariant::BoundJ1Only => "bound_j1",
        AlgorithmVariant::BoundAllJi => "bound_all",
    };
    let status = match &trace.status {
        LoopStatus::Completed => json!("completed"),
        LoopStatus::Aborted { at_step, reason } => json!({
            "aborted": { "at_step": at_step, "reason": reason }
        }),
    };
    let fallback_steps: Vec<usize> = trace
        .steps
        .iter()
        .filter(|st| st.fallback)
        .map(|st| st.k)
        .collect();
    let checks: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "status": e.status.as_str(),
                "worst_slack": f64_json(e.worst_slack),
                "tolerance": f64_json(e.tolerance),
                "detail": e.detail,
            })
        })
        .collect();
    let doc = json!({
        "schema_version": 1,
        "benchmark": benchmark,
        "horizon": trace.horizon,
        "iterations": trace.len(),
        "algorithm": algorithm,
        "loop_status": status,
        "fallback_steps": fallback_steps,
        "first_selection_cost": trace.first_solution().cost,
        "all_passed": report.all_passed(),
        "checks": checks,
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| io_err(e, path))
}

/// A gnuplot script that renders the requested figures from the CSVs.
/// The script is plain text and reads only the CSV artifacts.
pub fn write_plot_script(
    path: &Path,
    figures: &[crate::config::Figure],
    trace: &ClosedLoopTrace,
    front_files: &[(usize, String)],
    equilibrium_cost: &[f64],
) -> Result<(), CliError> {
    use crate::config::Figure;
    let n = trace.steps[0].state.len();
    let m = trace.steps[0].input.len();
    let s = trace.steps[0].stage_costs.len();
    // 1-based CSV column offsets.
    let col_x = 2;
    let col_cum = col_x + n + m + 3 * s;
    let col_avg = col_cum + s;

    let mut text = String::new();
    text.push_str("# Generated plot script; reads the CSV artifacts next to it.\n");
    text.push_str("set datafile separator ','\n");
    text.push_str("set key outside\n");
    text.push_str("set grid\n");
    text.push_str("set terminal pngcairo size 960,640\n\n");

    for figure in figures {
        match figure {
            Figure::Trajectory => {
                text.push_str("set output 'trajectory.png'\n");
                text.push_str("set xlabel 'k'\nset ylabel 'state'\n");
                let series: Vec<String> = (0..n)
                    .map(|i| {
                        format!(
                            "'trace.csv' using 1:{} with lines title 'x{}'",
                            col_x + i,
                            i + 1
                        )
                    })
                    .collect();
                text.push_str(&format!("plot {}\n\n", series.join(", \\\n     ")));
            }
            Figure::Averaged => {
                text.push_str("set output 'averaged_costs.png'\n");
                text.push_str("set xlabel 'k'\nset ylabel 'averaged cost'\n");
                let mut series: Vec<String> = (0..s)
                    .map(|i| {
                        format!(
                            "'trace.csv' using 1:{} with lines title 'avg J{}'",
                            col_avg + i,
                            i + 1
                        )
                    })
                    .collect();
                for (i, le) in equilibrium_cost.iter().enumerate() {
                    series.push(format!("{le} with lines dashtype 2 title 'bound J{}'", i + 1));
                }
                text.push_str(&format!("plot {}\n\n", series.join(", \\\n     ")));
            }
            Figure::Cumulative => {
                text.push_str("set output 'cumulative_costs.png'\n");
                text.push_str("set xlabel 'k'\nset ylabel 'cumulative cost'\n");
                let mut series: Vec<String> = (0..s)
                    .map(|i| {
                        format!(
                            "'trace.csv' using 1:{} with lines title 'J{}^k'",
                            col_cum + i,
                            i + 1
                        )
                    })
                    .collect();
                let first = &trace.first_solution().cost;
                series.push(format!(
                    "{} with lines dashtype 2 title 'first-selection J1 bound'",
                    first[0]
                ));
                text.push_str(&format!("plot {}\n\n", series.join(", \\\n     ")));
            }
            Figure::Front => {
                for (k, file) in front_files {
                    text.push_str(&format!("set output 'front_k{k}.png'\n"));
                    if s == 2 {
                        text.push_str("set xlabel 'J1'\nset ylabel 'J2'\n");
                        text.push_str(&format!(
                            "plot '{file}' using 2:3 with points pt 7 title 'front at k={k}'\n\n"
                        ));
                    } else {
                        text.push_str("set xlabel 'J1'\nset ylabel 'J2'\nset zlabel 'J3'\n");
                        text.push_str(&format!(
                            "splot '{file}' using 2:3:4 with points pt 7 title 'front at k={k}'\n\n"
                        ));
                    }
                }
            }
        }
    }
    std::fs::write(path, text).map_err(|e| io_err(e, path))
}
