//! Stage costs, cost functionals, rotated costs, and dissipativity
//! residuals.
//!
//! An [`ObjectiveSet`] bundles the `s ≥ 2` stage costs with the terminal
//! cost of the first criterion, an optional storage function, and an
//! optional dissipativity rate certificate. The storage function and the
//! certificate are never required to run the controller; they only feed
//! the diagnostics.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::dynamics::{SystemModel, TerminalSet, Trajectory};
use crate::error::{Error, Result};
use crate::math;

type StageCostFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type StateCostFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A comparison function (class K-infinity) with a closed-form inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonFn {
    /// `r ↦ c·r²`.
    Quadratic { coeff: f64 },
    /// `r ↦ c·min(r, knee)·r`: quadratic up to the knee, linear beyond.
    SaturatedQuadratic { coeff: f64, knee: f64 },
}

impl ComparisonFn {
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match *self {
            ComparisonFn::Quadratic { coeff } => coeff * r * r,
            ComparisonFn::SaturatedQuadratic { coeff, knee } => coeff * r.min(knee) * r,
        }
    }

    /// Inverse on the nonnegative half-line.
    pub fn inverse(&self, v: f64) -> f64 {
        let v = v.max(0.0);
        match *self {
            ComparisonFn::Quadratic { coeff } => math::sqrt(v / coeff),
            ComparisonFn::SaturatedQuadratic { coeff, knee } => {
                if v <= coeff * knee * knee {
                    math::sqrt(v / coeff)
                } else {
                    v / (coeff * knee)
                }
            }
        }
    }

    /// The same shape scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            ComparisonFn::Quadratic { coeff } => ComparisonFn::Quadratic {
                coeff: coeff * factor,
            },
            ComparisonFn::SaturatedQuadratic { coeff, knee } => ComparisonFn::SaturatedQuadratic {
                coeff: coeff * factor,
                knee,
            },
        }
    }
}

/// The `s ≥ 2` cost criteria of one problem instance.
pub struct ObjectiveSet {
    stage_costs: Vec<Box<StageCostFn>>,
    terminal_cost: Box<StateCostFn>,
    storage: Option<Box<StateCostFn>>,
    alpha: Option<ComparisonFn>,
    equilibrium_cost: Vec<f64>,
    equilibrium_state: Vec<f64>,
    equilibrium_input: Vec<f64>,
    terminal_set: TerminalSet,
}

impl core::fmt::Debug for ObjectiveSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ObjectiveSet")
            .field("num_objectives", &self.stage_costs.len())
            .field("has_storage", &self.storage.is_some())
            .field("alpha", &self.alpha)
            .field("equilibrium_cost", &self.equilibrium_cost)
            .finish_non_exhaustive()
    }
}

impl ObjectiveSet {
    /// Validates `s ≥ 2`, `F₁(x^e) = 0`, and `λ₁(x^e) = 0` (when a
    /// storage function is supplied), and caches the equilibrium cost
    /// vector.
    pub fn new(
        model: &SystemModel,
        stage_costs: Vec<Box<StageCostFn>>,
        terminal_cost: Box<StateCostFn>,
        storage: Option<Box<StateCostFn>>,
        alpha: Option<ComparisonFn>,
    ) -> Result<Self> {
        if stage_costs.len() < 2 {
            return Err(Error::InvalidObjectives("need at least two stage costs"));
        }
        let xe = model.equilibrium_state().to_vec();
        let ue = model.equilibrium_input().to_vec();
        if math::abs(terminal_cost(&xe)) > 1e-12 {
            return Err(Error::InvalidObjectives("terminal cost must vanish at x^e"));
        }
        if let Some(ref lam) = storage {
            if math::abs(lam(&xe)) > 1e-12 {
                return Err(Error::InvalidObjectives(
                    "storage function must vanish at x^e",
                ));
            }
        }
        let equilibrium_cost = stage_costs.iter().map(|l| l(&xe, &ue)).collect();
        Ok(Self {
            stage_costs,
            terminal_cost,
            storage,
            alpha,
            equilibrium_cost,
            equilibrium_state: xe,
            equilibrium_input: ue,
            terminal_set: model.terminal_set(),
        })
    }

    /// Number of cost criteria `s`.
    pub fn num_objectives(&self) -> usize {
        self.stage_costs.len()
    }

    /// Stage cost `ℓ_i(x, u)` (0-based index).
    pub fn stage_cost(&self, i: usize, x: &[f64], u: &[f64]) -> f64 {
        (self.stage_costs[i])(x, u)
    }

    /// Terminal cost of the first criterion.
    pub fn terminal_cost(&self, x: &[f64]) -> f64 {
        (self.terminal_cost)(x)
    }

    /// `(ℓ_1(x^e,u^e), …, ℓ_s(x^e,u^e))`.
    pub fn equilibrium_cost(&self) -> &[f64] {
        &self.equilibrium_cost
    }

    pub fn has_storage(&self) -> bool {
        self.storage.is_some()
    }

    /// Storage function value, when one is attached.
    pub fn storage(&self, x: &[f64]) -> Option<f64> {
        self.storage.as_ref().map(|lam| lam(x))
    }

    pub fn alpha(&self) -> Option<ComparisonFn> {
        self.alpha
    }

    fn terminal_distance(&self, x: &[f64]) -> f64 {
        let d = math::dist2(x, &self.equilibrium_state);
        match self.terminal_set {
            TerminalSet::EquilibriumPoint => d,
            TerminalSet::BallAroundEquilibrium { radius } => (d - radius).max(0.0),
        }
    }

    /// Cost functional `J_i^N`: the stage sum, plus the terminal cost
    /// when `i == 0`.
    ///
    /// For `i == 0` the terminal state must lie in the terminal set
    /// (within `terminal_tol`), since the terminal cost is only defined
    /// there.
    pub fn cost_functional(&self, traj: &Trajectory, i: usize, terminal_tol: f64) -> Result<f64> {
        if i >= self.stage_costs.len() {
            return Err(Error::ObjectiveIndexOutOfRange {
                index: i,
                count: self.stage_costs.len(),
            });
        }
        let mut total = 0.0;
        for k in 0..traj.horizon() {
            total += self.stage_cost(i, traj.state(k), traj.controls().get(k));
        }
        if i == 0 {
            let d = self.terminal_distance(traj.terminal_state());
            if d > terminal_tol {
                return Err(Error::TerminalOutsideDomain {
                    distance: d,
                    tolerance: terminal_tol,
                });
            }
            total += self.terminal_cost(traj.terminal_state());
        }
        Ok(total)
    }

    /// The full objective vector `(J_1^N, …, J_s^N)`.
    pub fn cost_vector(&self, traj: &Trajectory, terminal_tol: f64) -> Result<Vec<f64>> {
        (0..self.num_objectives())
            .map(|i| self.cost_functional(traj, i, terminal_tol))
            .collect()
    }

    /// Rotated stage cost
    /// `ℓ̃_1(x,u) = ℓ_1(x,u) − ℓ_1(x^e,u^e) + λ_1(x) − λ_1(x_next)`.
    pub fn rotated_stage_cost(&self, x: &[f64], u: &[f64], x_next: &[f64]) -> Result<f64> {
        let lam = self.storage.as_ref().ok_or(Error::StorageUnavailable)?;
        Ok(self.stage_cost(0, x, u) - self.equilibrium_cost[0] + lam(x) - lam(x_next))
    }

    /// Rotated cost functional: the sum of rotated stage costs plus the
    /// rotated terminal cost `F̃_1 = F_1 + λ_1`.
    ///
    /// Always equals `J_1^N − N·ℓ_1(x^e,u^e) + λ_1(x_0)`; the identity is
    /// exercised by tests, while this method computes the sum directly.
    pub fn rotated_functional(&self, traj: &Trajectory, terminal_tol: f64) -> Result<f64> {
        let lam = self.storage.as_ref().ok_or(Error::StorageUnavailable)?;
        let d = self.terminal_distance(traj.terminal_state());
        if d > terminal_tol {
            return Err(Error::TerminalOutsideDomain {
                distance: d,
                tolerance: terminal_tol,
            });
        }
        let mut total = 0.0;
        for k in 0..traj.horizon() {
            total += self.rotated_stage_cost(traj.state(k), traj.controls().get(k), traj.state(k + 1))?;
        }
        let xn = traj.terminal_state();
        total += self.terminal_cost(xn) + lam(xn);
        Ok(total)
    }

    /// `ℓ̃_1(x,u) − α(‖x−x^e‖ + ‖u−u^e‖)`; nonnegative when the problem
    /// is strictly dissipative with rate `α`.
    pub fn dissipativity_residual(&self, x: &[f64], u: &[f64], x_next: &[f64]) -> Result<f64> {
        let alpha = self.alpha.ok_or(Error::CertificateUnavailable)?;
        let rotated = self.rotated_stage_cost(x, u, x_next)?;
        let r = math::dist2(x, &self.equilibrium_state) + math::dist2(u, &self.equilibrium_input);
        Ok(rotated - alpha.eval(r))
    }

    /// Checks the terminal-cost compatibility inequality
    /// `F_1(f(x,κ(x))) + ℓ_1(x,κ(x)) ≤ F_1(x) + ℓ_1(x^e,u^e)` and its
    /// rotated counterpart at each sample, reporting the slack (RHS −
    /// LHS, nonnegative when satisfied).
    pub fn compatibility_check(
        &self,
        model: &SystemModel,
        samples: &[Vec<f64>],
        tol: f64,
    ) -> CompatibilityReport {
        let mut entries = Vec::with_capacity(samples.len());
        for x in samples {
            let u = model.kappa(x);
            let x_next = model.step(x, &u);
            let plain = self.terminal_cost(x) + self.equilibrium_cost[0]
                - self.terminal_cost(&x_next)
                - self.stage_cost(0, x, &u);
            let rotated = self.storage.as_ref().map(|lam| {
                let f_rot = |y: &[f64]| self.terminal_cost(y) + lam(y);
                let l_rot =
                    self.stage_cost(0, x, &u) - self.equilibrium_cost[0] + lam(x) - lam(&x_next);
                f_rot(x) - l_rot - f_rot(&x_next)
            });
            entries.push(CompatibilityEntry {
                plain_slack: plain,
                rotated_slack: rotated,
            });
        }
        let worst_plain = entries
            .iter()
            .map(|e| e.plain_slack)
            .fold(f64::INFINITY, f64::min);
        let worst_rotated = if self.storage.is_some() {
            Some(
                entries
                    .iter()
                    .filter_map(|e| e.rotated_slack)
                    .fold(f64::INFINITY, f64::min),
            )
        } else {
            None
        };
        let satisfied = worst_plain >= -tol && worst_rotated.map_or(true, |w| w >= -tol);
        CompatibilityReport {
            entries,
            worst_plain,
            worst_rotated,
            satisfied,
        }
    }
}

/// Per-sample slack of the compatibility inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityEntry {
    pub plain_slack: f64,
    pub rotated_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub entries: Vec<CompatibilityEntry>,
    /// Smallest plain slack over the samples.
    pub worst_plain: f64,
    /// Smallest rotated slack, when a storage function is attached.
    pub worst_rotated: Option<f64>,
    pub satisfied: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{rollout, BoxBounds, ControlSequence, SystemModel, TerminalSet};
    use crate::problems;

    fn equilibrium_traj(b: &problems::BenchmarkSpec, n: usize) -> Trajectory {
        let ue = b.model.equilibrium_input().to_vec();
        let u = ControlSequence::constant(&ue, n);
        rollout(&b.model, b.model.equilibrium_state(), &u).unwrap()
    }

    #[test]
    fn equilibrium_costs_cstr2() {
        let b = problems::make_cstr2();
        let traj = equilibrium_traj(&b, 5);
        assert_eq!(b.objectives.cost_functional(&traj, 0, 1e-8).unwrap(), 0.0);
        // 5 * (-2*12*0.5 + 0.5*12) = 5 * (-6)
        assert_eq!(b.objectives.cost_functional(&traj, 1, 1e-8).unwrap(), -30.0);
        assert_eq!(
            b.objectives.cost_vector(&traj, 1e-8).unwrap(),
            vec![0.0, -30.0]
        );
    }

    #[test]
    fn equilibrium_cost_cstr3_third_objective() {
        let b = problems::make_cstr3();
        let traj = equilibrium_traj(&b, 1);
        assert_eq!(b.objectives.cost_functional(&traj, 2, 1e-8).unwrap(), 144.0);
        assert_eq!(b.objectives.num_objectives(), 3);
    }

    #[test]
    fn equilibrium_cost_econ_closed_form() {
        let b = problems::make_econ();
        let xe = b.model.equilibrium_state()[0];
        let expected = -10.0 * (5.0 * xe.powf(0.34) - xe).ln();
        let traj = equilibrium_traj(&b, 10);
        let v = b.objectives.cost_vector(&traj, 1e-8).unwrap();
        assert!((v[0] - expected).abs() < 1e-10);
        assert!(v[1].abs() < 1e-20);
    }

    #[test]
    fn objective_index_out_of_range() {
        let b = problems::make_cstr2();
        let traj = equilibrium_traj(&b, 2);
        match b.objectives.cost_functional(&traj, 2, 1e-8) {
            Err(Error::ObjectiveIndexOutOfRange { index: 2, count: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn first_cost_requires_terminal_membership() {
        let b = problems::make_cstr2();
        let u = ControlSequence::constant(&[12.0], 3);
        let traj = rollout(&b.model, &[0.4, 0.2], &u).unwrap();
        assert!(matches!(
            b.objectives.cost_functional(&traj, 0, 1e-6),
            Err(Error::TerminalOutsideDomain { .. })
        ));
        // The second criterion has no terminal cost and needs no check.
        assert!(b.objectives.cost_functional(&traj, 1, 1e-6).is_ok());
    }

    #[test]
    fn rotated_stage_cost_cstr() {
        let b = problems::make_cstr2();
        let xe = b.model.equilibrium_state();
        let ue = b.model.equilibrium_input();
        assert_eq!(b.objectives.rotated_stage_cost(xe, ue, xe).unwrap(), 0.0);
        // λ ≡ 0 and ℓ_1(x^e,u^e) = 0, so the rotation is the identity.
        let r = b
            .objectives
            .rotated_stage_cost(&[0.4, 0.2], &[12.0], &[0.52, 0.2])
            .unwrap();
        assert!((r - 0.05).abs() < 1e-15);
        assert_eq!(r, b.objectives.stage_cost(0, &[0.4, 0.2], &[12.0]));
    }

    #[test]
    fn rotated_unavailable_without_storage() {
        let b = problems::make_econ();
        assert!(matches!(
            b.objectives.rotated_stage_cost(&[2.0], &[2.0], &[2.0]),
            Err(Error::StorageUnavailable)
        ));
    }

    #[test]
    fn rotated_functional_equilibrium_is_zero() {
        let b = problems::make_cstr2();
        let traj = equilibrium_traj(&b, 5);
        assert_eq!(b.objectives.rotated_functional(&traj, 1e-8).unwrap(), 0.0);
    }

    /// 1D toy with a genuinely nontrivial storage function and terminal
    /// cost; checks `J̃_1^N = J_1^N − N·ℓ_1(x^e,u^e) + λ_1(x_0)` on a
    /// deterministic sample sweep.
    #[test]
    fn rotated_identity_with_nontrivial_storage() {
        let model = SystemModel::new(
            1,
            1,
            Box::new(|x: &[f64], u: &[f64], out: &mut [f64]| out[0] = 0.5 * x[0] + u[0]),
            BoxBounds::new(vec![-100.0], vec![100.0]).unwrap(),
            BoxBounds::new(vec![-1.0], vec![1.0]).unwrap(),
            TerminalSet::BallAroundEquilibrium { radius: 100.0 },
            vec![0.0],
            vec![0.0],
            Box::new(|_x: &[f64], out: &mut [f64]| out[0] = 0.0),
        )
        .unwrap();
        let obj = ObjectiveSet::new(
            &model,
            vec![
                Box::new(|x: &[f64], u: &[f64]| x[0] + u[0] * u[0] + 1.0),
                Box::new(|x: &[f64], _u: &[f64]| x[0] * x[0]),
            ],
            Box::new(|x: &[f64]| x[0] * x[0]),
            Some(Box::new(|x: &[f64]| x[0] * x[0] * x[0] - 2.0 * x[0])),
            None,
        )
        .unwrap();

        for seed in 0..20 {
            let x0 = -3.0 + 0.3 * seed as f64;
            let u = ControlSequence::new(vec![
                vec![(seed % 5) as f64 * 0.3 - 0.6],
                vec![((seed + 2) % 4) as f64 * 0.4 - 0.8],
                vec![0.25],
            ])
            .unwrap();
            let traj = rollout(&model, &[x0], &u).unwrap();
            let direct = obj.rotated_functional(&traj, 1e-8).unwrap();
            let j1 = obj.cost_functional(&traj, 0, 1e-8).unwrap();
            let identity = j1 - 3.0 * obj.equilibrium_cost()[0] + obj.storage(&[x0]).unwrap();
            assert!(
                (direct - identity).abs() < 1e-8,
                "identity violated: {direct} vs {identity}"
            );
        }
    }

    #[test]
    fn dissipativity_residual_zero_at_equilibrium() {
        let b = problems::make_cstr2();
        let xe = b.model.equilibrium_state();
        let ue = b.model.equilibrium_input();
        assert_eq!(b.objectives.dissipativity_residual(xe, ue, xe).unwrap(), 0.0);
    }

    #[test]
    fn dissipativity_residual_grid_sweep() {
        // 100x100x100 grid over X x U with the saturated certificate.
        let b = problems::make_cstr2();
        let alpha = ComparisonFn::SaturatedQuadratic {
            coeff: 0.25,
            knee: 1.0,
        };
        let mut worst = f64::INFINITY;
        for ia in 0..100 {
            let ca = 20.0 * ia as f64 / 99.0;
            for ib in 0..100 {
                let cb = 20.0 * ib as f64 / 99.0;
                for iu in 0..100 {
                    let u = 20.0 * iu as f64 / 99.0;
                    let x = [ca, cb];
                    let uu = [u];
                    let rotated = b.objectives.stage_cost(0, &x, &uu);
                    let r = math::dist2(&x, &[0.5, 0.5]) + (u - 12.0).abs();
                    let residual = rotated - alpha.eval(r);
                    worst = worst.min(residual);
                }
            }
        }
        assert!(worst >= 0.0, "worst residual {worst}");
    }

    #[test]
    fn residual_increases_when_alpha_shrinks() {
        let b = problems::make_cstr2();
        let points = [([0.4, 0.2], [12.0]), ([0.7, 0.6], [10.0]), ([0.5, 0.5], [14.0])];
        for (x, u) in points {
            let x_next = b.model.step(&x, &u);
            let full = b.objectives.dissipativity_residual(&x, &u, &x_next).unwrap();
            let alpha = b.objectives.alpha().unwrap();
            let halved = b
                .objectives
                .rotated_stage_cost(&x, &u, &x_next)
                .unwrap()
                - alpha.scaled(0.5).eval(
                    math::dist2(&x, b.model.equilibrium_state())
                        + math::dist2(&u, b.model.equilibrium_input()),
                );
            assert!(halved >= full);
        }
    }

    #[test]
    fn rotated_nonnegative_on_samples() {
        let b = problems::make_cstr2();
        for ia in 0..20 {
            for iu in 0..20 {
                let x = [0.1 + 0.09 * ia as f64, 1.9 - 0.09 * ia as f64];
                let u = [iu as f64];
                let x_next = b.model.step(&x, &u);
                let r = b.objectives.rotated_stage_cost(&x, &u, &x_next).unwrap();
                assert!(r >= -1e-9);
            }
       }
    }

    /// Certificates bounding each non-first stage cost by a K-infinity
    /// function of the rotated first stage cost.
    #[test]
    fn omega_bound_certificates() {
        let b = problems::make_cstr3();
        let omega = [
            |t: f64| 48.0 * t.sqrt() + 2.0 * t, // second criterion
            |t: f64| 48.0 * t.sqrt() + 4.0 * t, // third criterion
        ];
        let le = b.objectives.equilibrium_cost().to_vec();
        for ia in 0..15 {
            for ib in 0..15 {
                for iu in 0..15 {
                    let x = [0.05 + 0.13 * ia as f64, 0.05 + 0.13 * ib as f64];
                    let u = [iu as f64 * 20.0 / 14.0];
                    let x_next = b.model.step(&x, &u);
                    let t = b.objectives.rotated_stage_cost(&x, &u, &x_next).unwrap();
                    for (j, om) in omega.iter().enumerate() {
                        let dev = (b.objectives.stage_cost(j + 1, &x, &u) - le[j + 1]).abs();
                        assert!(
                            dev <= om(t) + 1e-9,
                            "omega bound violated at {x:?} {u:?}: {dev} > {}",
                            om(t)
                        );
                    }
                }
            }
        }
    }

    fn toy_ball_model() -> SystemModel {
        SystemModel::new(
            1,
            1,
            Box::new(|x: &[f64], u: &[f64], out: &mut [f64]| out[0] = 0.5 * x[0] + u[0]),
            BoxBounds::new(vec![-10.0], vec![10.0]).unwrap(),
            BoxBounds::new(vec![-2.0], vec![2.0]).unwrap(),
            TerminalSet::BallAroundEquilibrium { radius: 0.5 },
            vec![0.0],
            vec![0.0],
            Box::new(|_x: &[f64], out: &mut [f64]| out[0] = 0.0),
        )
        .unwrap()
    }

    #[test]
    fn compatibility_singleton_has_zero_slack() {
        let b = problems::make_cstr2();
        let samples = b.model.terminal_samples();
        let report = b.objectives.compatibility_check(&b.model, &samples, 1e-9);
        assert!(report.satisfied);
        assert_eq!(report.worst_plain, 0.0);
        assert_eq!(report.worst_rotated, Some(0.0));
    }

    #[test]
    fn compatibility_ball_with_quadratic_terminal_cost() {
        // x+ = x/2 under κ ≡ 0 and ℓ_1 = x² + u²: F_1 = 2x² satisfies
        // F_1(x/2) + ℓ_1(x,0) = x²/2 + x² ≤ 2x².
        let model = toy_ball_model();
        let obj = ObjectiveSet::new(
            &model,
            vec![
                Box::new(|x: &[f64], u: &[f64]| x[0] * x[0] + u[0] * u[0]),
                Box::new(|_x: &[f64], u: &[f64]| u[0]),
            ],
            Box::new(|x: &[f64]| 2.0 * x[0] * x[0]),
            Some(Box::new(|_x: &[f64]| 0.0)),
            None,
        )
        .unwrap();
        let samples = model.terminal_samples();
        let report = obj.compatibility_check(&model, &samples, 1e-9);
        assert!(report.satisfied, "worst slack {}", report.worst_plain);
        // Slack at the boundary sample x = 0.5: 2*0.25 - 0.125 - 0.25.
        assert!(report
            .entries
            .iter()
            .any(|e| (e.plain_slack - 0.125).abs() < 1e-12));
    }

    #[test]
    fn compatibility_flags_broken_terminal_cost() {
        // F_1 ≡ 0 cannot absorb ℓ_1 > 0 on the ball.
        let model = toy_ball_model();
        let obj = ObjectiveSet::new(
            &model,
            vec![
                Box::new(|x: &[f64], u: &[f64]| x[0] * x[0] + u[0] * u[0]),
                Box::new(|_x: &[f64], u: &[f64]| u[0]),
            ],
            Box::new(|_x: &[f64]| 0.0),
            None,
            None,
        )
        .unwrap();
        let samples = model.terminal_samples();
        let report = obj.compatibility_check(&model, &samples, 1e-9);
        assert!(!report.satisfied);
        assert!(report.worst_plain < -0.2);
    }

    #[test]
    fn constructor_rejects_single_objective() {
        let b = problems::make_cstr2();
        let result = ObjectiveSet::new(
            &b.model,
            vec![Box::new(|_x: &[f64], _u: &[f64]| 0.0)],
            Box::new(|_x: &[f64]| 0.0),
            None,
            None,
        );
        assert!(matches!(result, Err(Error::InvalidObjectives(_))));
    }

    #[test]
    fn constructor_rejects_nonvanishing_terminal_cost() {
        let b = problems::make_cstr2();
        let result = ObjectiveSet::new(
            &b.model,
            vec![
                Box::new(|_x: &[f64], _u: &[f64]| 0.0),
                Box::new(|_x: &[f64], _u: &[f64]| 0.0),
            ],
            Box::new(|_x: &[f64]| 1.0),
            None,
            None,
        );
        assert!(matches!(result, Err(Error::InvalidObjectives(_))));
    }

    #[test]
    fn comparison_fn_inverse_roundtrip() {
        let fns = [
            ComparisonFn::Quadratic { coeff: 0.25 },
            ComparisonFn::SaturatedQuadratic {
                coeff: 0.25,
                knee: 1.0,
            },
        ];
        for f in fns {
            for r in [0.0, 0.3, 1.0, 2.5, 10.0] {
                let v = f.eval(r);
                assert!((f.inverse(v) - r).abs() < 1e-12, "{f:?} at {r}");
            }
        }
    }
}
