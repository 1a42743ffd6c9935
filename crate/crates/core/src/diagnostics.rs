//! Post-hoc verification of the closed loop's guarantees.
//!
//! Every check is a pure function of a [`ClosedLoopTrace`] and the
//! problem data: cumulative and averaged performance, rotated partial
//! sums, Lyapunov descent, endpoint bounds, and the linear-error
//! performance envelope. Quantities are recomputed from states and
//! stored control sequences, so corrupted traces are detected.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::math;
use crate::mpc::{AlgorithmVariant, ClosedLoopTrace};
use crate::objectives::ObjectiveSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The trace is too short to decide.
    Inconclusive,
    /// Required certificates are not attached to this problem.
    NotAvailable,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
            CheckStatus::NotAvailable => "not_available",
        }
    }
}

/// One verified inequality (or family of inequalities).
#[derive(Debug, Clone)]
pub struct ReportEntry {
    pub name: String,
    pub status: CheckStatus,
    /// Largest left-minus-right residual observed; nonpositive values
    /// mean the inequality held with room to spare.
    pub worst_slack: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl ReportEntry {
    fn not_available(name: &str, detail: &str) -> Self {
        Self {
            name: String::from(name),
            status: CheckStatus::NotAvailable,
            worst_slack: None,
            tolerance: None,
            detail: String::from(detail),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PerformanceReport {
    pub entries: Vec<ReportEntry>,
}

impl PerformanceReport {
    pub fn all_passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.status != CheckStatus::Fail)
    }
}

/// Cumulative first-criterion performance against the first selection:
/// `Σ_{j<K} (ℓ_1(j) − ℓ_1^e) ≤ J_1^N(x_0,u*_0) − N·ℓ_1^e + λ_1(x(K)) −
/// λ_1(x_0)` for every prefix K. The storage terms carry the finite-K
/// transient and vanish in the limit; with the zero storage function
/// this is the plain cumulative bound. Without a storage function the
/// finite-horizon form is unavailable (only the averaged limit
/// statement holds, covered by [`check_averaged`]).
pub fn check_j1_performance(
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    tol: f64,
) -> ReportEntry {
    if !objectives.has_storage() {
        return ReportEntry::not_available(
            "j1_performance",
            "finite-horizon form needs the storage function; see the averaged check",
        );
    }
    let le1 = objectives.equilibrium_cost()[0];
    let lam0 = objectives.storage(&trace.steps[0].state).unwrap();
    let base = trace.first_solution().cost[0] - trace.horizon as f64 * le1 - lam0;
    let mut partial = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=trace.len() {
        partial += trace.steps[k - 1].stage_costs[0] - le1;
        let bound = base + objectives.storage(trace.state(k)).unwrap();
        worst = worst.max(partial - bound);
    }
    ReportEntry {
        name: String::from("j1_performance"),
        status: if worst <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: Some(worst),
        tolerance: Some(tol),
        detail: format!(
            "cumulative shifted J1 vs first-selection bound {base:.6} (+ storage transient) over {} steps",
            trace.len()
        ),
    }
}

/// Rotated partial sums: each term nonnegative (so the sums are
/// nondecreasing) and every prefix below the rotated value of the first
/// selection.
pub fn check_rotated_performance(
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    tol: f64,
) -> ReportEntry {
    if !objectives.has_storage() {
        return ReportEntry::not_available(
            "rotated_performance",
            "no storage function attached",
        );
    }
    let le1 = objectives.equilibrium_cost()[0];
    let n = trace.horizon as f64;
    let bound = trace.first_solution().cost[0] - n * le1
        + objectives.storage(&trace.steps[0].state).unwrap();

    let mut partial = 0.0;
    let mut worst = f64::NEG_INFINITY;
    let mut min_term = f64::INFINITY;
    for k in 0..trace.len() {
        let term = objectives
            .rotated_stage_cost(trace.state(k), &trace.steps[k].input, trace.state(k + 1))
            .expect("storage checked above");
        min_term = min_term.min(term);
        partial += term;
        worst = worst.max(partial - bound);
    }
    let monotone_ok = min_term >= -1e-9;
    ReportEntry {
        name: String::from("rotated_performance"),
        status: if worst <= tol && monotone_ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: Some(worst),
        tolerance: Some(tol),
        detail: format!(
            "rotated prefix sums vs bound {bound:.6}; smallest rotated stage cost {min_term:.3e}"
        ),
    }
}

/// Averaged performance `J̄_i^k ≤ ℓ_i(x^e,u^e) + tol` where the limsup
/// is operationalized as the maximum over the final 10% of the trace.
/// Traces shorter than 100 steps are inconclusive.
pub fn check_averaged(
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    i: usize,
    tol_avg: f64,
) -> ReportEntry {
    let name = format!("averaged_j{}", i + 1);
    let bound = objectives.equilibrium_cost()[i];
    if trace.len() < 100 {
        return ReportEntry {
            name,
            status: CheckStatus::Inconclusive,
            worst_slack: None,
            tolerance: Some(tol_avg),
            detail: String::from("trace shorter than 100 steps"),
        };
    }
    let cum = trace.cumulative(i);
    let k_total = trace.len();
    let tail_start = (k_total as f64 * 0.9) as usize;
    let mut worst = f64::NEG_INFINITY;
    for k in tail_start.max(1)..=k_total {
        worst = worst.max(cum[k] / k as f64 - bound);
    }
    ReportEntry {
        name,
        status: if worst <= tol_avg {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: Some(worst),
        tolerance: Some(tol_avg),
        detail: format!("tail max of averaged cost vs equilibrium value {bound:.6}"),
    }
}

/// Rotated horizon value recomputed from a state and a stored control
/// sequence, with no terminal-domain guard so that corrupted traces
/// produce a detectable violation instead of an error.
fn rotated_value_recomputed(
    model: &SystemModel,
    objectives: &ObjectiveSet,
    x: &[f64],
    controls: &crate::dynamics::ControlSequence,
) -> Option<f64> {
    let traj = crate::dynamics::rollout(model, x, controls).ok()?;
    let mut total = 0.0;
    for k in 0..traj.horizon() {
        total += objectives
            .rotated_stage_cost(traj.state(k), traj.controls().get(k), traj.state(k + 1))
            .ok()?;
    }
    let xn = traj.terminal_state();
    Some(total + objectives.terminal_cost(xn) + objectives.storage(xn)?)
}

/// Lyapunov descent of `V(k) = J̃_1^N(x(k), u*_{x(k)})` along the trace:
/// `V(k+1) ≤ V(k) − α(‖x(k)−x^e‖)`, the lower sandwich
/// `α(‖x(k)−x^e‖) ≤ V(k)`, and the implied norm bound
/// `‖x(k)−x^e‖ ≤ α⁻¹(V(0))`.
pub fn lyapunov_descent(
    model: &SystemModel,
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    tol: f64,
) -> ReportEntry {
    let name = String::from("lyapunov_descent");
    if !objectives.has_storage() {
        return ReportEntry::not_available(&name, "no storage function attached");
    }
    let Some(alpha) = objectives.alpha() else {
        return ReportEntry::not_available(&name, "no dissipativity rate certificate attached");
    };
    let xe = model.equilibrium_state();

    let mut values = Vec::with_capacity(trace.len());
    for step in &trace.steps {
        match rotated_value_recomputed(model, objectives, &step.state, &step.chosen.controls) {
            Some(v) => values.push(v),
            None => {
                return ReportEntry {
                    name,
                    status: CheckStatus::Fail,
                    worst_slack: None,
                    tolerance: Some(tol),
                    detail: format!("value recomputation failed at step {}", step.k),
                }
            }
        }
    }

    let mut worst = f64::NEG_INFINITY;
    let norm_cap = alpha.inverse(values[0] + tol);
    for k in 0..values.len() {
        let dist = math::dist2(trace.state(k), xe);
        // Lower sandwich.
        worst = worst.max(alpha.eval(dist) - values[k]);
        // Norm bound implied by descent plus the sandwich.
        worst = worst.max(dist - norm_cap);
        if k + 1 < values.len() {
            worst = worst.max(values[k + 1] - (values[k] - alpha.eval(dist)));
        }
    }
    ReportEntry {
        name,
        status: if worst <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: Some(worst),
        tolerance: Some(tol),
        detail: format!(
            "descent, sandwich, and norm-cap residuals over {} steps (V(0) = {:.6})",
            values.len(),
            values[0]
        ),
    }
}

/// Distances of the predicted horizon endpoints to the terminal set,
/// recomputed per step. With a point terminal set every value must stay
/// within the tolerance; the trend over k is reported, not asserted.
pub fn endpoint_bound(model: &SystemModel, trace: &ClosedLoopTrace, tol: f64) -> ReportEntry {
    let mut worst = f64::NEG_INFINITY;
    let mut series = Vec::with_capacity(trace.len());
    for step in &trace.steps {
        let d = match crate::dynamics::rollout(model, &step.state, &step.chosen.controls) {
            Ok(traj) => model.terminal_distance(traj.terminal_state()),
            Err(_) => f64::INFINITY,
        };
        series.push(d);
        worst = worst.max(d - tol);
    }
    let trend = if series.len() >= 2 {
        let half = series.len() / 2;
        let early = series[..half].iter().fold(0.0_f64, |a, b| a.max(*b));
        let late = series[half..].iter().fold(0.0_f64, |a, b| a.max(*b));
        if late <= early { "non-increasing" } else { "increasing" }
    } else {
        "short"
    };
    ReportEntry {
        name: String::from("endpoint_bound"),
        status: if worst <= 0.0 {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: Some(worst),
        tolerance: Some(tol),
        detail: format!("predicted endpoint distances, trend {trend}"),
    }
}

/// Performance envelope for criterion `i ≥ 1`:
/// `J_i^K ≤ J_i^N(x_0,u*_0) + (K−N)·ℓ_i^e + K·δ(N)` for all `K ≥ k_min`.
/// Requires a trace produced with bounds on every criterion.
pub fn ji_performance_envelope(
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    i: usize,
    delta: &dyn Fn(usize) -> f64,
    k_min: usize,
    tol: f64,
) -> Result<ReportEntry> {
    if trace.variant != AlgorithmVariant::BoundAllJi {
        return Err(Error::EnvelopeRequiresAllBounds);
    }
    if i >= objectives.num_objectives() {
        return Err(Error::ObjectiveIndexOutOfRange {
            index: i,
            count: objectives.num_objectives(),
        });
    }
    let n = trace.horizon;
    let le = objectives.equilibrium_cost()[i];
    let j_first = trace.first_solution().cost[i];
    let d = delta(n);
    let cum = trace.cumulative(i);
    let start = k_min.max(n);
    let mut worst = f64::NEG_INFINITY;
    for k in start..=trace.len() {
        let bound = j_first + (k - n) as f64 * le + k as f64 * d;
        worst = worst.max(cum[k] - bound);
    }
    Ok(ReportEntry {
        name: format!("envelope_j{}", i + 1),
        status: if trace.len() < start {
            CheckStatus::Inconclusive
        } else if worst <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_slack: (trace.len() >= start).then_some(worst),
        tolerance: Some(tol),
        detail: format!("delta(N) = {d:.6}, onset K = {start}"),
    })
}

/// Envelope configuration for [`run_all`].
#[derive(Debug, Clone)]
pub struct EnvelopeSpec {
    /// 0-based objective index.
    pub objective: usize,
    /// The value `δ(N)` for this run's horizon.
    pub delta: f64,
    /// Onset; defaults to `10·N`.
    pub k_min: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    pub perf_tol: f64,
    pub avg_tol: f64,
    pub lyapunov_tol: f64,
    pub endpoint_tol: f64,
    pub envelope: Option<EnvelopeSpec>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            perf_tol: 1e-6,
            avg_tol: 0.1,
            lyapunov_tol: 1e-6,
            endpoint_tol: crate::FEASIBILITY_TOL,
            envelope: None,
        }
    }
}

/// Runs every applicable check and collects the report.
pub fn run_all(
    model: &SystemModel,
    objectives: &ObjectiveSet,
    trace: &ClosedLoopTrace,
    cfg: &DiagnosticsConfig,
) -> PerformanceReport {
    let mut entries = Vec::new();
    if trace.is_empty() {
        return PerformanceReport { entries };
    }
    entries.push(check_j1_performance(objectives, trace, cfg.perf_tol));
    entries.push(check_rotated_performance(objectives, trace, cfg.perf_tol));
    for i in 0..objectives.num_objectives() {
        entries.push(check_averaged(objectives, trace, i, cfg.avg_tol));
    }
    entries.push(lyapunov_descent(model, objectives, trace, cfg.lyapunov_tol));
    entries.push(endpoint_bound(model, trace, cfg.endpoint_tol));
    if let Some(env) = &cfg.envelope {
        let k_min = env.k_min.unwrap_or(10 * trace.horizon);
        match ji_performance_envelope(
            objectives,
            trace,
            env.objective,
            &|_| env.delta,
            k_min,
            cfg.perf_tol,
        ) {
            Ok(entry) => entries.push(entry),
            Err(e) => entries.push(ReportEntry::not_available(
                &format!("envelope_j{}", env.objective + 1),
                &format!("{e}"),
            )),
        }
    }
    PerformanceReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::{run_closed_loop, AlgorithmVariant, MpcConfig};
    use crate::problems;

    fn equilibrium_trace(iterations: usize, variant: AlgorithmVariant) -> ClosedLoopTrace {
        let b = problems::make_cstr2();
        let mut cfg = MpcConfig::new(5, iterations);
        cfg.variant = variant;
        // Tracking-first selection keeps the loop stationary.
        cfg.first_selection =
            crate::mpc::FirstSelection::Rule(crate::mpc::SelectionRule::MinObjective(0));
        cfg.solver.restarts = 1;
        run_closed_loop(&b.model, &b.objectives, &[0.5, 0.5], &cfg).unwrap()
    }

    #[test]
    fn equilibrium_trace_passes_everything() {
        let b = problems::make_cstr2();
        let trace = equilibrium_trace(3, AlgorithmVariant::BoundAllJi);
        let entry = check_j1_performance(&b.objectives, &trace, 1e-6);
        assert_eq!(entry.status, CheckStatus::Pass);
        assert!(entry.worst_slack.unwrap() <= 1e-6);

        let entry = check_rotated_performance(&b.objectives, &trace, 1e-6);
        assert_eq!(entry.status, CheckStatus::Pass);

        let entry = lyapunov_descent(&b.model, &b.objectives, &trace, 1e-6);
        assert_eq!(entry.status, CheckStatus::Pass);

        let entry = endpoint_bound(&b.model, &trace, 1e-6);
        assert_eq!(entry.status, CheckStatus::Pass);
    }

    #[test]
    fn averaged_is_inconclusive_on_short_traces() {
        let b = problems::make_cstr2();
        let trace = equilibrium_trace(3, AlgorithmVariant::BoundJ1Only);
        let entry = check_averaged(&b.objectives, &trace, 0, 0.1);
        assert_eq!(entry.status, CheckStatus::Inconclusive);
    }

    #[test]
    fn envelope_requires_all_bounds() {
        let b = problems::make_cstr2();
        let trace = equilibrium_trace(3, AlgorithmVariant::BoundJ1Only);
        match ji_performance_envelope(&b.objectives, &trace, 1, &|_| 0.2, 5, 1e-6) {
            Err(Error::EnvelopeRequiresAllBounds) => {}
            other => panic!("expected variant error, got {other:?}"),
        }
    }

    #[test]
    fn envelope_is_tight_at_the_equilibrium() {
        // The growth model's costs are both quadratic around the
        // equilibrium, so solver noise enters the envelope only at
        // second order and δ ≡ 0 gives equality within 1e-9.
        let b = problems::make_econ();
        let xe = b.model.equilibrium_state().to_vec();
        let mut cfg = MpcConfig::new(5, 12);
        cfg.variant = AlgorithmVariant::BoundAllJi;
        cfg.solver.restarts = 1;
        let trace = run_closed_loop(&b.model, &b.objectives, &xe, &cfg).unwrap();
        let entry =
            ji_performance_envelope(&b.objectives, &trace, 1, &|_| 0.0, 5, 1e-9).unwrap();
        assert_eq!(entry.status, CheckStatus::Pass, "{entry:?}");
        assert!(entry.worst_slack.unwrap().abs() <= 1e-9, "{entry:?}");
    }

    #[test]
    fn corrupted_trace_is_detected() {
        let b = problems::make_cstr2();
        let mut cfg = MpcConfig::new(5, 12);
        cfg.solver.restarts = 1;
        let mut trace = run_closed_loop(&b.model, &b.objectives, &[0.4, 0.2], &cfg).unwrap();
        let clean = lyapunov_descent(&b.model, &b.objectives, &trace, 1e-6);
        assert_eq!(clean.status, CheckStatus::Pass, "{clean:?}");

        let early = trace.steps[1].state.clone();
        let late = trace.steps[8].state.clone();
        trace.steps[1].state = late;
        trace.steps[8].state = early;
        let corrupted = lyapunov_descent(&b.model, &b.objectives, &trace, 1e-6);
        assert_eq!(corrupted.status, CheckStatus::Fail);
    }

    #[test]
    fn report_collects_all_entries() {
        let b = problems::make_cstr2();
        let trace = equilibrium_trace(3, AlgorithmVariant::BoundAllJi);
        let report = run_all(&b.model, &b.objectives, &trace, &DiagnosticsConfig::default());
        assert!(report.entries.len() >= 5);
        assert!(report.all_passed());
    }
}
