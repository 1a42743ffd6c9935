//! Discrete-time system models, trajectory rollout, and feasibility.
//!
//! A [`SystemModel`] is immutable after construction and safe to share
//! across threads; [`rollout`] is a pure function of its arguments.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Absolute tolerance for the equilibrium fixed-point property.
pub const EQUILIBRIUM_TOL: f64 = 1e-10;

/// Closed interval bounds per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "box bounds",
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidModel("empty box: lower > upper"));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Largest componentwise violation of `v` (0 when inside).
    pub fn violation(&self, v: &[f64]) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(v)
            .map(|((l, u), x)| (l - x).max(x - u).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.violation(v) <= tol
    }

    pub fn clamp(&self, v: &mut [f64]) {
        for ((x, l), u) in v.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.max(*l).min(*u);
        }
    }
}

/// Terminal constraint set around the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalSet {
    /// The singleton `{x^e}`.
    EquilibriumPoint,
    /// A Euclidean ball of the given radius around `x^e`.
    BallAroundEquilibrium { radius: f64 },
}

type StepFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;
type FeedbackFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Discrete-time nonlinear system with constraint sets, an equilibrium,
/// and a local terminal feedback.
pub struct SystemModel {
    state_dim: usize,
    input_dim: usize,
    step: Box<StepFn>,
    state_box: BoxBounds,
    input_box: BoxBounds,
    terminal_set: TerminalSet,
    equilibrium_state: Vec<f64>,
    equilibrium_input: Vec<f64>,
    local_feedback: Box<FeedbackFn>,
}

impl core::fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SystemModel")
            .field("state_dim", &self.state_dim)
            .field("input_dim", &self.input_dim)
            .field("terminal_set", &self.terminal_set)
            .field("equilibrium_state", &self.equilibrium_state)
            .field("equilibrium_input", &self.equilibrium_input)
            .finish_non_exhaustive()
    }
}

impl SystemModel {
    /// Builds a model and validates its invariants: nonempty boxes,
    /// consistent dimensions, the equilibrium fixed-point property, and
    /// invariance of the terminal set under the local feedback (checked
    /// at sampled points for the ball case).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        state_dim: usize,
        input_dim: usize,
        step: Box<StepFn>,
        state_box: BoxBounds,
        input_box: BoxBounds,
        terminal_set: TerminalSet,
        equilibrium_state: Vec<f64>,
        equilibrium_input: Vec<f64>,
        local_feedback: Box<FeedbackFn>,
    ) -> Result<Self> {
        if state_box.dim() != state_dim || equilibrium_state.len() != state_dim {
            return Err(Error::InvalidModel("state dimension mismatch"));
        }
        if input_box.dim() != input_dim || equilibrium_input.len() != input_dim {
            return Err(Error::InvalidModel("input dimension mismatch"));
        }
        if let TerminalSet::BallAroundEquilibrium { radius } = terminal_set {
            if !(radius > 0.0) {
                return Err(Error::InvalidModel("terminal ball radius must be positive"));
            }
        }

        let model = Self {
            state_dim,
            input_dim,
            step,
            state_box,
            input_box,
            terminal_set,
            equilibrium_state,
            equilibrium_input,
            local_feedback,
        };

        let mut next = alloc::vec![0.0; state_dim];
        (model.step)(&model.equilibrium_state, &model.equilibrium_input, &mut next);
        if math::dist_inf(&next, &model.equilibrium_state) > EQUILIBRIUM_TOL {
            return Err(Error::InvalidModel("equilibrium is not a fixed point"));
        }

        // x^e must lie in the terminal set and κ must keep the set
        // invariant; for the ball this is a sampled check.
        for sample in model.terminal_samples() {
            let u = model.kappa(&sample);
            let image = model.step(&sample, &u);
            if model.terminal_distance(&image) > 1e-9 {
                return Err(Error::InvalidModel(
                    "local feedback does not keep the terminal set invariant",
                ));
            }
        }

        Ok(model)
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn state_box(&self) -> &BoxBounds {
        &self.state_box
    }

    pub fn input_box(&self) -> &BoxBounds {
        &self.input_box
    }

    pub fn terminal_set(&self) -> TerminalSet {
        self.terminal_set
    }

    pub fn equilibrium_state(&self) -> &[f64] {
        &self.equilibrium_state
    }

    pub fn equilibrium_input(&self) -> &[f64] {
        &self.equilibrium_input
    }

    /// One step of the dynamics, writing into `out`.
    pub fn step_into(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        (self.step)(x, u, out);
    }

    /// One step of the dynamics.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.state_dim];
        (self.step)(x, u, &mut out);
        out
    }

    /// The local terminal feedback κ.
    pub fn kappa(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.input_dim];
        (self.local_feedback)(x, &mut out);
        out
    }

    /// Distance of `x` to the terminal set (0 inside).
    pub fn terminal_distance(&self, x: &[f64]) -> f64 {
        let d = math::dist2(x, &self.equilibrium_state);
        match self.terminal_set {
            TerminalSet::EquilibriumPoint => d,
            TerminalSet::BallAroundEquilibrium { radius } => (d - radius).max(0.0),
        }
    }

    /// Deterministic sample points inside the terminal set, used for
    /// invariance and compatibility checks.
    pub fn terminal_samples(&self) -> Vec<Vec<f64>> {
        let mut samples = alloc::vec![self.equilibrium_state.clone()];
        if let TerminalSet::BallAroundEquilibrium { radius } = self.terminal_set {
            for coord in 0..self.state_dim {
                for scale in [1.0, 0.5, -0.5, -1.0] {
                    let mut s = self.equilibrium_state.clone();
                    s[coord] += scale * radius;
                    samples.push(s);
                }
            }
        }
        samples
    }
}

/// A control sequence of fixed horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    inputs: Vec<Vec<f64>>,
}

impl ControlSequence {
    pub fn new(inputs: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidConfig("control sequence must be nonempty"));
        }
        let m = inputs[0].len();
        for u in &inputs {
            if u.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "control sequence element",
                    expected: m,
                    got: u.len(),
                });
            }
        }
        Ok(Self { inputs })
    }

    /// A constant sequence `u(k) ≡ value` of the given length.
    pub fn constant(value: &[f64], len: usize) -> Self {
        Self {
            inputs: (0..len).map(|_| value.to_vec()).collect(),
        }
    }

    /// Reassembles a sequence from the flat layout `[u(0); u(1); …]`.
    pub fn from_flat(flat: &[f64], input_dim: usize) -> Self {
        debug_assert_eq!(flat.len() % input_dim, 0);
        Self {
            inputs: flat.chunks(input_dim).map(|c| c.to_vec()).collect(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.inputs.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.inputs[k]
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }
}

/// A rolled-out trajectory: `N+1` states and the generating controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    controls: ControlSequence,
}

impl Trajectory {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn terminal_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has N+1 states")
    }

    pub fn controls(&self) -> &ControlSequence {
        &self.controls
    }

    /// Horizon length `N` (number of controls).
    pub fn horizon(&self) -> usize {
        self.controls.len()
    }
}

/// Rolls the dynamics out from `x0` under `u`.
///
/// Deterministic: identical inputs yield bit-identical trajectories. A
/// non-finite state aborts with the offending step index.
pub fn rollout(model: &SystemModel, x0: &[f64], u: &ControlSequence) -> Result<Trajectory> {
    if x0.len() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: model.state_dim(),
            got: x0.len(),
        });
    }
    if u.input_dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "control input",
            expected: model.input_dim(),
            got: u.input_dim(),
        });
    }
    let mut states = Vec::with_capacity(u.len() + 1);
    states.push(x0.to_vec());
    for k in 0..u.len() {
        let mut next = alloc::vec![0.0; model.state_dim()];
        model.step_into(&states[k], u.get(k), &mut next);
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::DynamicsBlowUp { step: k });
        }
        states.push(next);
    }
    Ok(Trajectory {
        states,
        controls: u.clone(),
    })
}

/// Where a trajectory violates the constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    StateBox { step: usize, coord: usize },
    InputBox { step: usize, coord: usize },
    Terminal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub magnitude: f64,
}

/// Feasibility is a report, not an error.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// Largest violation magnitude (0 when feasible).
    pub worst: f64,
}

/// Checks admissibility of a rolled-out trajectory within `tol`:
/// interior states in the state box, the terminal state in the terminal
/// set, and every input in the input box.
pub fn is_feasible(model: &SystemModel, traj: &Trajectory, tol: f64) -> FeasibilityReport {
    let mut violations = Vec::new();
    let n = traj.horizon();

    for (k, u) in traj.controls().inputs().iter().enumerate() {
        for (coord, ((x, l), h)) in u
            .iter()
            .zip(model.input_box().lower())
            .zip(model.input_box().upper())
            .enumerate()
        {
            let v = (l - x).max(x - h);
            if v > tol {
                violations.push(Violation {
                    kind: ViolationKind::InputBox { step: k, coord },
                    magnitude: v,
                });
            }
        }
    }

    for k in 1..n {
        for (coord, ((x, l), h)) in traj
            .state(k)
            .iter()
            .zip(model.state_box().lower())
            .zip(model.state_box().upper())
            .enumerate()
        {
            let v = (l - x).max(x - h);
            if v > tol {
                violations.push(Violation {
                    kind: ViolationKind::StateBox { step: k, coord },
                    magnitude: v,
                });
            }
        }
    }

    let term = model.terminal_distance(traj.terminal_state());
    if term > tol {
        violations.push(Violation {
            kind: ViolationKind::Terminal,
            magnitude: term,
        });
    }

    let worst = violations
        .iter()
        .map(|v| v.magnitude)
        .fold(0.0, f64::max);
    FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
        worst,
    }
}

/// The shifted comparison sequence `(u*(1), …, u*(N−1), κ(x))` with
/// `x = x_{u*}(N, x_k)`.
///
/// Requires the rollout of `u_star` from `x_k` to reach the terminal set
/// within `tol`; the result is then feasible from `f(x_k, u*(0))`.
pub fn comparison_sequence(
    model: &SystemModel,
    u_star: &ControlSequence,
    x_k: &[f64],
    tol: f64,
) -> Result<ControlSequence> {
    let traj = rollout(model, x_k, u_star)?;
    let term = model.terminal_distance(traj.terminal_state());
    if term > tol {
        return Err(Error::ComparisonPreconditionViolated {
            terminal_distance: term,
        });
    }
    let mut inputs: Vec<Vec<f64>> = u_star.inputs()[1..].to_vec();
    inputs.push(model.kappa(traj.terminal_state()));
    Ok(ControlSequence { inputs })
}
