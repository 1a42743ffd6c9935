//! Scalarized solves of the multiobjective optimal control problem.
//!
//! Decision variables are the control sequence only; states are
//! eliminated by forward substitution (single shooting). Input-box
//! bounds are handled by projection inside the inner solver, everything
//! else (state box, terminal constraint, cost upper bounds, the
//! Pascoletti–Serafini cone) by the augmented Lagrangian.

mod enumerate;
mod front;
pub mod nlp;

pub use enumerate::brute_force_front;
pub use front::{approximate_front, dominance_filter, dominates, ideal_point, solve_extremal};

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use rand_core::{RngCore, SeedableRng};

use crate::dynamics::{ControlSequence, SystemModel, TerminalSet};
use crate::error::{Error, Result, StalledIterate};
use crate::objectives::ObjectiveSet;

/// One instance of the multiobjective optimal control problem.
#[derive(Clone)]
pub struct MooProblem<'a> {
    model: &'a SystemModel,
    objectives: &'a ObjectiveSet,
    horizon: usize,
    x0: Vec<f64>,
    cost_upper_bounds: Vec<(usize, f64)>,
}

impl core::fmt::Debug for MooProblem<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MooProblem")
            .field("horizon", &self.horizon)
            .field("x0", &self.x0)
            .field("cost_upper_bounds", &self.cost_upper_bounds)
            .finish_non_exhaustive()
    }
}

impl<'a> MooProblem<'a> {
    pub fn new(
        model: &'a SystemModel,
        objectives: &'a ObjectiveSet,
        horizon: usize,
        x0: Vec<f64>,
    ) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidConfig("horizon must be at least 2"));
        }
        if x0.len() != model.state_dim() {
            return Err(Error::DimensionMismatch {
                what: "initial state",
                expected: model.state_dim(),
                got: x0.len(),
            });
        }
        if !model.state_box().contains(&x0, crate::FEASIBILITY_TOL) {
            return Err(Error::InvalidConfig("x0 outside the state box"));
        }
        Ok(Self {
            model,
            objectives,
            horizon,
            x0,
            cost_upper_bounds: Vec::new(),
        })
    }

    /// The same problem with cost upper bounds `J_i ≤ b_i` attached.
    /// A single bound on the first criterion encodes the constraint used
    /// by the first algorithm variant; bounds on every index encode the
    /// second.
    pub fn with_bounds(mut self, bounds: Vec<(usize, f64)>) -> Result<Self> {
        let s = self.objectives.num_objectives();
        for (pos, (i, _)) in bounds.iter().enumerate() {
            if *i >= s {
                return Err(Error::ObjectiveIndexOutOfRange { index: *i, count: s });
            }
            if bounds[..pos].iter().any(|(j, _)| j == i) {
                return Err(Error::InvalidConfig("duplicate bound index"));
            }
        }
        self.cost_upper_bounds = bounds;
        Ok(self)
    }

    pub fn model(&self) -> &'a SystemModel {
        self.model
    }

    pub fn objectives(&self) -> &'a ObjectiveSet {
        self.objectives
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn cost_upper_bounds(&self) -> &[(usize, f64)] {
        &self.cost_upper_bounds
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.num_objectives()
    }
}

/// How the objective vector is collapsed to a scalar.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalarizer {
    /// `min Σ w_i J_i` with nonnegative weights, not all zero.
    WeightedSum { weights: Vec<f64> },
    /// `min t` subject to `J ≤ reference + t·direction`.
    PascolettiSerafini {
        reference: Vec<f64>,
        direction: Vec<f64>,
    },
    /// `min Σ (J_i − point_i)²` — the squared Euclidean distance, which
    /// has the same minimizers as the distance itself.
    DistanceToPoint { point: Vec<f64> },
    /// `min J_i`.
    SingleObjective { index: usize },
}

/// Provenance of an efficient solution.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarizationTag {
    WeightedSum { weights: Vec<f64> },
    PascolettiSerafini { reference: Vec<f64> },
    DistanceToPoint { point: Vec<f64> },
    SingleObjective { index: usize },
    /// Produced by grid enumeration rather than a scalarized solve.
    Enumeration,
    /// The warm start itself was returned (solver fallback).
    Fallback,
}

impl ScalarizationTag {
    /// Short stable label for serialization.
    pub fn label(&self) -> alloc::string::String {
        use alloc::string::ToString;
        match self {
            ScalarizationTag::WeightedSum { .. } => "weighted_sum".to_string(),
            ScalarizationTag::PascolettiSerafini { .. } => "pascoletti_serafini".to_string(),
            ScalarizationTag::DistanceToPoint { .. } => "distance_to_point".to_string(),
            ScalarizationTag::SingleObjective { index } => {
                alloc::format!("single_objective_{index}")
            }
            ScalarizationTag::Enumeration => "enumeration".to_string(),
            ScalarizationTag::Fallback => "fallback".to_string(),
        }
    }
}

/// A feasible control sequence together with its objective vector.
#[derive(Debug, Clone)]
pub struct EfficientSolution {
    pub controls: ControlSequence,
    pub cost: Vec<f64>,
    pub tag: ScalarizationTag,
    pub kkt_residual: f64,
    pub constraint_violation: f64,
}

/// A finite approximation of the nondominated set.
#[derive(Debug, Clone)]
pub struct FrontApproximation {
    /// Mutually nondominated, sorted by the first objective.
    pub points: Vec<EfficientSolution>,
    /// Componentwise minima over the (bound-constrained) feasible set,
    /// when available.
    pub ideal: Option<Vec<f64>>,
}

impl FrontApproximation {
    pub fn costs(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.cost.clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub dominance_tol: f64,
    pub kkt_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Additional solve attempts from fallback starting points.
    pub restarts: u32,
    /// Seed for the deterministic perturbation of fallback starts.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: crate::FEASIBILITY_TOL,
            dominance_tol: crate::DOMINANCE_TOL,
            kkt_tol: 1e-8,
            max_outer: 200,
            max_inner: 80,
            restarts: 2,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn nlp_options(&self) -> nlp::NlpOptions {
        nlp::NlpOptions {
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            kkt_tol: self.kkt_tol,
            // Cost-bound rows are scale-normalized inside the evaluator,
            // so the internal target sits well below the feasibility
            // tolerance even for large cost magnitudes.
            constraint_tol: (self.feasibility_tol * 1e-4).min(1e-10),
            fd_step: 1e-6,
            initial_penalty: 10.0,
        }
    }
}

/// Bounds with magnitudes beyond this are treated as absent.
const UNBOUNDED: f64 = 1e100;

struct Scratch {
    states: Vec<f64>,
    cost: Vec<f64>,
}

/// Single-shooting evaluator: maps a flat decision vector to objective,
/// constraints, and measures, reusing internal buffers.
pub(crate) struct Evaluator<'a, 'b> {
    p: &'b MooProblem<'a>,
    scalarizer: Scalarizer,
    num_controls: usize,
    dim: usize,
    num_eq: usize,
    num_ineq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// `(coord, bound, is_upper)` applied to every interior state.
    state_constraints: Vec<(usize, f64, bool)>,
    /// Row scales `1 + |b_i|` for the cost upper bounds: cost criteria
    /// live on very different magnitudes, and normalized rows keep the
    /// augmented Lagrangian well conditioned.
    bound_scales: Vec<f64>,
    /// Row scales for the cone inequalities of the Pascoletti–Serafini
    /// scalarization.
    cone_scales: Vec<f64>,
    scratch: RefCell<Scratch>,
}

impl<'a, 'b> Evaluator<'a, 'b> {
    fn new(p: &'b MooProblem<'a>, scalarizer: Scalarizer) -> Self {
        let n = p.model.state_dim();
        let m = p.model.input_dim();
        let big_n = p.horizon;
        let s = p.objectives.num_objectives();
        let num_controls = big_n * m;
        let has_aux = matches!(scalarizer, Scalarizer::PascolettiSerafini { .. });
        let dim = num_controls + has_aux as usize;

        let mut state_constraints = Vec::new();
        for coord in 0..n {
            let lo = p.model.state_box().lower()[coord];
            let hi = p.model.state_box().upper()[coord];
            if lo > -UNBOUNDED {
                state_constraints.push((coord, lo, false));
            }
            if hi < UNBOUNDED {
                state_constraints.push((coord, hi, true));
            }
        }

        let num_eq = match p.model.terminal_set() {
            TerminalSet::EquilibriumPoint => n,
            TerminalSet::BallAroundEquilibrium { .. } => 0,
        };
        let ball = matches!(
            p.model.terminal_set(),
            TerminalSet::BallAroundEquilibrium { .. }
        );
        let num_ineq = state_constraints.len() * (big_n - 1)
            + ball as usize
            + p.cost_upper_bounds.len()
            + if has_aux { s } else { 0 };

        let mut lower = Vec::with_capacity(dim);
        let mut upper = Vec::with_capacity(dim);
        for _ in 0..big_n {
            lower.extend_from_slice(p.model.input_box().lower());
            upper.extend_from_slice(p.model.input_box().upper());
        }
        if has_aux {
            lower.push(f64::NEG_INFINITY);
            upper.push(f64::INFINITY);
        }

        let bound_scales = p
            .cost_upper_bounds
            .iter()
            .map(|(_, b)| 1.0 + b.abs())
            .collect();
        let cone_scales = match &scalarizer {
            Scalarizer::PascolettiSerafini { reference, .. } => {
                reference.iter().map(|a| 1.0 + a.abs()).collect()
            }
            _ => Vec::new(),
        };

        Self {
            p,
            scalarizer,
            num_controls,
            dim,
            num_eq,
            num_ineq,
            lower,
            upper,
            state_constraints,
            bound_scales,
            cone_scales,
            scratch: RefCell::new(Scratch {
                states: vec![0.0; (big_n + 1) * n],
                cost: vec![0.0; s],
            }),
        }
    }

    /// Rolls out `v[..num_controls]` and fills the cost vector in the
    /// scratch buffer. Returns false on a non-finite state.
    fn shoot(&self, v: &[f64], sc: &mut Scratch) -> bool {
        let model = self.p.model;
        let n = model.state_dim();
        let m = model.input_dim();
        let big_n = self.p.horizon;
        sc.states[..n].copy_from_slice(&self.p.x0);
        for k in 0..big_n {
            let (head, tail) = sc.states.split_at_mut((k + 1) * n);
            model.step_into(&head[k * n..], &v[k * m..(k + 1) * m], &mut tail[..n]);
            if tail[..n].iter().any(|x| !x.is_finite()) {
                return false;
            }
        }
        let obj = self.p.objectives;
        let s = obj.num_objectives();
        for i in 0..s {
            let mut total = 0.0;
            for k in 0..big_n {
                total += obj.stage_cost(i, &sc.states[k * n..(k + 1) * n], &v[k * m..(k + 1) * m]);
            }
            sc.cost[i] = total;
        }
        sc.cost[0] += obj.terminal_cost(&sc.states[big_n * n..]);
        sc.cost.iter().all(|c| c.is_finite())
    }

    /// NLP-facing evaluation: objective plus equality/inequality blocks.
    fn eval(&self, v: &[f64], out: &mut nlp::NlpValues) {
        let mut sc = self.scratch.borrow_mut();
        let sc = &mut *sc;
        if !self.shoot(v, sc) {
            out.finite = false;
            out.objective = f64::INFINITY;
            return;
        }
        out.finite = true;

        let model = self.p.model;
        let n = model.state_dim();
        let big_n = self.p.horizon;
        let xe = model.equilibrium_state();
        let xn = &sc.states[big_n * n..];

        match model.terminal_set() {
            TerminalSet::EquilibriumPoint => {
                for j in 0..n {
                    out.eq[j] = xn[j] - xe[j];
                }
            }
            TerminalSet::BallAroundEquilibrium { .. } => {}
        }

        let mut idx = 0;
        for k in 1..big_n {
            let xk = &sc.states[k * n..(k + 1) * n];
            for &(coord, bound, is_upper) in &self.state_constraints {
                out.ineq[idx] = if is_upper {
                    xk[coord] - bound
                } else {
                    bound - xk[coord]
                };
                idx += 1;
            }
        }
        if let TerminalSet::BallAroundEquilibrium { radius } = model.terminal_set() {
            let d2: f64 = xn.iter().zip(xe).map(|(a, b)| (a - b) * (a - b)).sum();
            out.ineq[idx] = d2 - radius * radius;
            idx += 1;
        }
        for (pos, &(i, b)) in self.p.cost_upper_bounds.iter().enumerate() {
            out.ineq[idx] = (sc.cost[i] - b) / self.bound_scales[pos];
            idx += 1;
        }

        out.objective = match &self.scalarizer {
            Scalarizer::WeightedSum { weights } => {
                weights.iter().zip(&sc.cost).map(|(w, j)| w * j).sum()
            }
            Scalarizer::SingleObjective { index } => sc.cost[*index],
            Scalarizer::DistanceToPoint { point } => point
                .iter()
                .zip(&sc.cost)
                .map(|(z, j)| (j - z) * (j - z))
                .sum(),
            Scalarizer::PascolettiSerafini {
                reference,
                direction,
            } => {
                let t = v[self.dim - 1];
                for i in 0..sc.cost.len() {
                    out.ineq[idx] =
                        (sc.cost[i] - reference[i] - t * direction[i]) / self.cone_scales[i];
                    idx += 1;
                }
                t
            }
        };
        if !out.objective.is_finite() {
            out.finite = false;
            out.objective = f64::INFINITY;
        }
    }

    /// Cost vector and canonical violation measures for a flat control
    /// vector: `(cost, base violation, bound violation)`. The base part
    /// covers state box, input box, and terminal membership (Euclidean);
    /// the bound part covers the cost upper bounds.
    fn measures(&self, controls: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
        let mut sc = self.scratch.borrow_mut();
        let sc = &mut *sc;
        if !self.shoot(controls, sc) {
            return None;
        }
        let model = self.p.model;
        let n = model.state_dim();
        let m = model.input_dim();
        let big_n = self.p.horizon;

        let mut base: f64 = 0.0;
        for k in 0..big_n {
            base = base.max(model.input_box().violation(&controls[k * m..(k + 1) * m]));
        }
        for k in 1..big_n {
            base = base.max(model.state_box().violation(&sc.states[k * n..(k + 1) * n]));
        }
        base = base.max(model.terminal_distance(&sc.states[big_n * n..]));

        let mut bound: f64 = 0.0;
        for &(i, b) in &self.p.cost_upper_bounds {
            bound = bound.max(sc.cost[i] - b);
        }
        Some((sc.cost.clone(), base, bound.max(0.0)))
    }

    /// Initial value for the auxiliary cone variable so that the start
    /// satisfies the cone inequalities.
    fn aux_start(&self, controls: &[f64]) -> f64 {
        if let Scalarizer::PascolettiSerafini {
            reference,
            direction,
        } = &self.scalarizer
        {
            if let Some((cost, _, _)) = self.measures(controls) {
                return cost
                    .iter()
                    .zip(reference)
                    .zip(direction)
                    .map(|((j, a), r)| (j - a) / r.max(1e-12))
                    .fold(f64::NEG_INFINITY, f64::max)
                    .max(0.0);
            }
            return 1.0;
        }
        0.0
    }
}

fn validate_scalarizer(p: &MooProblem, scalarizer: &Scalarizer) -> Result<()> {
    let s = p.objectives.num_objectives();
    match scalarizer {
        Scalarizer::WeightedSum { weights } => {
            if weights.len() != s {
                return Err(Error::DimensionMismatch {
                    what: "weight vector",
                    expected: s,
                    got: weights.len(),
                });
            }
            if weights.iter().any(|w| *w < 0.0) || weights.iter().all(|w| *w == 0.0) {
                return Err(Error::InvalidConfig(
                    "weights must be nonnegative and not all zero",
                ));
            }
        }
        Scalarizer::SingleObjective { index } => {
            if *index >= s {
                return Err(Error::ObjectiveIndexOutOfRange {
                    index: *index,
                    count: s,
                });
            }
        }
        Scalarizer::DistanceToPoint { point } => {
            if point.len() != s {
                return Err(Error::DimensionMismatch {
                    what: "reference point",
                    expected: s,
                    got: point.len(),
                });
            }
        }
        Scalarizer::PascolettiSerafini {
            reference,
            direction,
        } => {
            if reference.len() != s || direction.len() != s {
                return Err(Error::DimensionMismatch {
                    what: "scalarization reference/direction",
                    expected: s,
                    got: reference.len().min(direction.len()),
                });
            }
            if direction.iter().any(|d| *d < 0.0) || direction.iter().all(|d| *d == 0.0) {
                return Err(Error::InvalidConfig(
                    "direction must be nonnegative and not all zero",
                ));
            }
        }
    }
    Ok(())
}

fn tag_for(scalarizer: &Scalarizer) -> ScalarizationTag {
    match scalarizer {
        Scalarizer::WeightedSum { weights } => ScalarizationTag::WeightedSum {
            weights: weights.clone(),
        },
        Scalarizer::PascolettiSerafini { reference, .. } => ScalarizationTag::PascolettiSerafini {
            reference: reference.clone(),
        },
        Scalarizer::DistanceToPoint { point } => ScalarizationTag::DistanceToPoint {
            point: point.clone(),
        },
        Scalarizer::SingleObjective { index } => ScalarizationTag::SingleObjective { index: *index },
    }
}

fn uniform(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Starting points: the warm start when given, then the equilibrium
/// input held constant, the input-box midpoint, and seeded perturbations
/// of the equilibrium start.
fn build_attempts(
    p: &MooProblem,
    warm_start: Option<&ControlSequence>,
    opts: &SolverOptions,
) -> Vec<Vec<f64>> {
    let m = p.model.input_dim();
    let big_n = p.horizon;
    let lo = p.model.input_box().lower();
    let hi = p.model.input_box().upper();

    let mut ue = p.model.equilibrium_input().to_vec();
    p.model.input_box().clamp(&mut ue);
    let ue_flat: Vec<f64> = (0..big_n).flat_map(|_| ue.iter().copied()).collect();
    let mid: Vec<f64> = (0..big_n)
        .flat_map(|_| lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)))
        .collect();

    let total = 1 + opts.restarts as usize;
    let mut attempts: Vec<Vec<f64>> = Vec::with_capacity(total);
    if let Some(w) = warm_start {
        attempts.push(w.to_flat());
    }
    if attempts.len() < total {
        attempts.push(ue_flat.clone());
    }
    if attempts.len() < total {
        attempts.push(mid);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    while attempts.len() < total {
        let mut v = ue_flat.clone();
        for (k, x) in v.iter_mut().enumerate() {
            let half = 0.25 * (hi[k % m] - lo[k % m]);
            *x += (2.0 * uniform(&mut rng) - 1.0) * half;
            *x = x.max(lo[k % m]).min(hi[k % m]);
        }
        attempts.push(v);
    }
    attempts
}

/// Solves one scalarization of the problem, honoring the cost upper
/// bounds, the state and input boxes, and the terminal constraint.
///
/// With a warm start the first converged attempt is returned and a
/// dominance post-check guarantees the result is not dominated by the
/// warm start (falling back to the warm start itself otherwise). Cold
/// solves run all attempts and keep the best feasible objective.
pub fn solve_scalarized(
    p: &MooProblem,
    scalarizer: Scalarizer,
    warm_start: Option<&ControlSequence>,
    opts: &SolverOptions,
) -> Result<EfficientSolution> {
    validate_scalarizer(p, &scalarizer)?;
    if let Some(w) = warm_start {
        if w.len() != p.horizon || w.input_dim() != p.model.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "warm start",
                expected: p.horizon * p.model.input_dim(),
                got: w.len() * w.input_dim(),
            });
        }
    }

    let tag = tag_for(&scalarizer);
    let ev = Evaluator::new(p, scalarizer);
    let nlp_opts = opts.nlp_options();
    let attempts = build_attempts(p, warm_start, opts);

    // (objective, solution) for feasible results; (base, bound, solution)
    // for the best infeasible iterate.
    let mut best_feasible: Option<(f64, EfficientSolution)> = None;
    let mut best_infeasible: Option<(f64, f64, EfficientSolution)> = None;

    for guess in &attempts {
        let mut x0 = guess.clone();
        if ev.dim > ev.num_controls {
            x0.push(ev.aux_start(guess));
        }
        let res = nlp::solve(
            &|v: &[f64], out: &mut nlp::NlpValues| ev.eval(v, out),
            &x0,
            &ev.lower,
            &ev.upper,
            ev.num_eq,
            ev.num_ineq,
            &nlp_opts,
        );
        let controls = &res.x[..ev.num_controls];
        let Some((cost, base, bound)) = ev.measures(controls) else {
            continue;
        };
        let sol = EfficientSolution {
            controls: ControlSequence::from_flat(controls, p.model.input_dim()),
            cost,
            tag: tag.clone(),
            kkt_residual: res.kkt_residual,
            constraint_violation: base.max(bound),
        };
        if sol.constraint_violation <= opts.feasibility_tol {
            let phi = res.values.objective;
            if best_feasible.as_ref().map_or(true, |(b, _)| phi < *b) {
                best_feasible = Some((phi, sol));
            }
            if warm_start.is_some() {
                break;
            }
        } else if best_infeasible
            .as_ref()
            .map_or(true, |(b, c, _)| sol.constraint_violation < b.max(*c))
        {
            best_infeasible = Some((base, bound, sol));
        }
    }

    if let Some((_, sol)) = best_feasible {
        if let Some(w) = warm_start {
            if let Some((wcost, wbase, wbound)) = ev.measures(&w.to_flat()) {
                if wbase.max(wbound) <= opts.feasibility_tol
                    && dominates(&wcost, &sol.cost, opts.dominance_tol)
                {
                    return Ok(EfficientSolution {
                        controls: w.clone(),
                        cost: wcost,
                        tag: ScalarizationTag::Fallback,
                        kkt_residual: sol.kkt_residual,
                        constraint_violation: wbase.max(wbound),
                    });
                }
            }
        }
        return Ok(sol);
    }

    // No attempt converged; a feasible warm start is still a valid
    // (stalled) answer and is returned as such.
    if let Some(w) = warm_start {
        if let Some((wcost, wbase, wbound)) = ev.measures(&w.to_flat()) {
            if wbase.max(wbound) <= opts.feasibility_tol {
                return Ok(EfficientSolution {
                    controls: w.clone(),
                    cost: wcost,
                    tag: ScalarizationTag::Fallback,
                    kkt_residual: f64::NAN,
                    constraint_violation: wbase.max(wbound),
                });
            }
        }
    }

    match best_infeasible {
        // The plain constraints are met; only the cost bounds are not.
        Some((base, _, _)) if base <= opts.feasibility_tol => Err(Error::BoundSetInfeasible),
        Some((_, _, sol)) => {
            if bound_set_provably_empty(p, opts) {
                return Err(Error::BoundSetInfeasible);
            }
            Err(Error::SolverStalled(Box::new(StalledIterate {
                controls: sol.controls.inputs().to_vec(),
                cost: sol.cost.clone(),
                kkt_residual: sol.kkt_residual,
                constraint_violation: sol.constraint_violation,
            })))
        }
        None => Err(Error::InfeasibleInitialState),
    }
}

/// Checks whether the cost upper bounds cut the feasible set to nothing:
/// each bounded objective is minimized over the plain feasible set, and
/// a minimum above its bound proves emptiness. Runs only on failure
/// paths; probe failures are inconclusive.
fn bound_set_provably_empty(p: &MooProblem, opts: &SolverOptions) -> bool {
    if p.cost_upper_bounds.is_empty() {
        return false;
    }
    let plain = MooProblem {
        cost_upper_bounds: Vec::new(),
        ..p.clone()
    };
    for &(i, b) in &p.cost_upper_bounds {
        if let Ok(sol) = solve_scalarized(&plain, Scalarizer::SingleObjective { index: i }, None, opts)
        {
            if sol.cost[i] > b + opts.feasibility_tol {
                return true;
            }
        }
    }
    false
}

/// Cost vector and violation of a given control sequence for this
/// problem (bounds included), without solving anything.
pub fn evaluate_controls(p: &MooProblem, controls: &ControlSequence) -> Result<(Vec<f64>, f64)> {
    if controls.len() != p.horizon || controls.input_dim() != p.model.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "control sequence",
            expected: p.horizon * p.model.input_dim(),
            got: controls.len() * controls.input_dim(),
        });
    }
    let ev = Evaluator::new(
        p,
        Scalarizer::SingleObjective { index: 0 },
    );
    let (cost, base, bound) = ev
        .measures(&controls.to_flat())
        .ok_or(Error::DynamicsBlowUp { step: 0 })?;
    Ok((cost, base.max(bound)))
}
