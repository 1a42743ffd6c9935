//! Dependency-free inner solver: an augmented Lagrangian outer loop with
//! projected quasi-Newton (BFGS) inner iterations for box bounds, and
//! central finite-difference gradients.
//!
//! The decision dimension here is small (horizon times input dimension,
//! plus one auxiliary variable for some scalarizations), so dense BFGS
//! with an explicit inverse Hessian is adequate.

use alloc::vec;
use alloc::vec::Vec;

/// Values of the objective and all constraints at one point.
#[derive(Debug, Clone)]
pub struct NlpValues {
    pub objective: f64,
    /// Equality constraints, target 0.
    pub eq: Vec<f64>,
    /// Inequality constraints, target ≤ 0.
    pub ineq: Vec<f64>,
    /// False when the evaluation ran into non-finite numbers.
    pub finite: bool,
}

impl NlpValues {
    pub fn new(num_eq: usize, num_ineq: usize) -> Self {
        Self {
            objective: 0.0,
            eq: vec![0.0; num_eq],
            ineq: vec![0.0; num_ineq],
            finite: true,
        }
    }

    pub fn violation(&self) -> f64 {
        let eq = self.eq.iter().fold(0.0_f64, |a, h| a.max(h.abs()));
        let ineq = self.ineq.iter().fold(0.0_f64, |a, g| a.max(g.max(0.0)));
        eq.max(ineq)
    }
}

#[derive(Debug, Clone)]
pub struct NlpOptions {
    pub max_outer: usize,
    pub max_inner: usize,
    /// Target on the projected gradient of the augmented Lagrangian.
    pub kkt_tol: f64,
    /// Target on the worst constraint violation.
    pub constraint_tol: f64,
    /// Relative central-difference step: `h = step*(1+|v|)`.
    pub fd_step: f64,
    pub initial_penalty: f64,
}

impl Default for NlpOptions {
    fn default() -> Self {
        Self {
            max_outer: 200,
            max_inner: 80,
            kkt_tol: 1e-8,
            constraint_tol: 1e-9,
            fd_step: 1e-6,
            initial_penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NlpResult {
    pub x: Vec<f64>,
    pub values: NlpValues,
    pub kkt_residual: f64,
    pub constraint_violation: f64,
    pub converged: bool,
    pub outer_iterations: usize,
}

/// Bounds with magnitudes beyond this are treated as absent.
const UNBOUNDED: f64 = 1e100;

struct Workspace<'a, F: Fn(&[f64], &mut NlpValues)> {
    eval: &'a F,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    rho: f64,
    scratch: NlpValues,
    plus: NlpValues,
    minus: NlpValues,
}

impl<F: Fn(&[f64], &mut NlpValues)> Workspace<'_, F> {
    /// Augmented Lagrangian merit value at `v`.
    fn merit(&mut self, v: &[f64]) -> f64 {
        (self.eval)(v, &mut self.scratch);
        if !self.scratch.finite || !self.scratch.objective.is_finite() {
            return f64::INFINITY;
        }
        let mut m = self.scratch.objective;
        for (h, lam) in self.scratch.eq.iter().zip(&self.lambda) {
            m += lam * h + 0.5 * self.rho * h * h;
        }
        for (g, mu) in self.scratch.ineq.iter().zip(&self.mu) {
            let t = (mu + self.rho * g).max(0.0);
            m += (t * t - mu * mu) / (2.0 * self.rho);
        }
        if m.is_finite() {
            m
        } else {
            f64::INFINITY
        }
    }

    /// Gradient of the merit, assembled from central finite differences
    /// of the objective and constraint values:
    /// `∇L = ∇f + Σ (λ+ρh)·∇h + Σ max(0, μ+ρg)·∇g`.
    ///
    /// Differencing values instead of the merit keeps the penalty
    /// parameter from amplifying finite-difference noise.
    fn gradient(&mut self, v: &mut [f64], fd_step: f64, grad: &mut [f64]) {
        (self.eval)(v, &mut self.scratch);
        let c_eq: Vec<f64> = self
            .scratch
            .eq
            .iter()
            .zip(&self.lambda)
            .map(|(h, lam)| lam + self.rho * h)
            .collect();
        let c_ineq: Vec<f64> = self
            .scratch
            .ineq
            .iter()
            .zip(&self.mu)
            .map(|(g, mu)| (mu + self.rho * g).max(0.0))
            .collect();
        for i in 0..v.len() {
            let vi = v[i];
            let h = fd_step * (1.0 + vi.abs());
            v[i] = vi + h;
            (self.eval)(v, &mut self.plus);
            v[i] = vi - h;
            (self.eval)(v, &mut self.minus);
            v[i] = vi;
            if !self.plus.finite || !self.minus.finite {
                grad[i] = 0.0;
                continue;
            }
            let inv = 1.0 / (2.0 * h);
            let mut g = (self.plus.objective - self.minus.objective) * inv;
            for j in 0..c_eq.len() {
                g += c_eq[j] * (self.plus.eq[j] - self.minus.eq[j]) * inv;
            }
            for j in 0..c_ineq.len() {
                if c_ineq[j] > 0.0 {
                    g += c_ineq[j] * (self.plus.ineq[j] - self.minus.ineq[j]) * inv;
                }
            }
            grad[i] = g;
        }
    }
}

fn project(v: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((x, l), u) in v.iter_mut().zip(lower).zip(upper) {
        if *l > -UNBOUNDED {
            *x = x.max(*l);
        }
        if *u < UNBOUNDED {
            *x = x.min(*u);
        }
    }
}

fn projected_gradient_norm(v: &[f64], grad: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    let mut norm = 0.0_f64;
    for i in 0..v.len() {
        let eps = 1e-10 * (1.0 + v[i].abs());
        let at_lower = lower[i] > -UNBOUNDED && v[i] - lower[i] <= eps;
        let at_upper = upper[i] < UNBOUNDED && upper[i] - v[i] <= eps;
        let pg = if at_lower {
            grad[i].min(0.0)
        } else if at_upper {
            grad[i].max(0.0)
        } else {
            grad[i]
        };
        norm = norm.max(pg.abs());
    }
    norm
}

/// Minimizes `objective(v)` subject to `eq(v) = 0`, `ineq(v) ≤ 0`, and
/// `lower ≤ v ≤ upper`. `eval` must fill an [`NlpValues`] for a given
/// point; it is the only way the solver sees the problem.
pub fn solve<F: Fn(&[f64], &mut NlpValues)>(
    eval: &F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    num_eq: usize,
    num_ineq: usize,
    options: &NlpOptions,
) -> NlpResult {
    let dim = x0.len();
    let mut v = x0.to_vec();
    project(&mut v, lower, upper);

    let mut ws = Workspace {
        eval,
        lambda: vec![0.0; num_eq],
        mu: vec![0.0; num_ineq],
        rho: options.initial_penalty,
        scratch: NlpValues::new(num_eq, num_ineq),
        plus: NlpValues::new(num_eq, num_ineq),
        minus: NlpValues::new(num_eq, num_ineq),
    };

    let mut grad = vec![0.0; dim];
    let mut grad_next = vec![0.0; dim];
    let mut hessian_inv = vec![0.0; dim * dim];
    let mut direction = vec![0.0; dim];
    let mut trial = vec![0.0; dim];

    let mut inner_tol = 1e-2_f64;
    let mut prev_violation = f64::INFINITY;
    let mut stall_count = 0usize;
    let mut last_pg = f64::INFINITY;
    let mut outer_used = 0usize;

    for outer in 0..options.max_outer {
        outer_used = outer + 1;

        // Fresh quasi-Newton model for the new merit function.
        hessian_inv.iter_mut().for_each(|h| *h = 0.0);
        for i in 0..dim {
            hessian_inv[i * dim + i] = 1.0;
        }

        let mut merit = ws.merit(&v);
        ws.gradient(&mut v, options.fd_step, &mut grad);

        for _ in 0..options.max_inner {
            let pg = projected_gradient_norm(&v, &grad, lower, upper);
            last_pg = pg;
            if pg <= inner_tol {
                break;
            }

            // Quasi-Newton direction with active bound coordinates frozen.
            for i in 0..dim {
                let mut d = 0.0;
                for j in 0..dim {
                    d -= hessian_inv[i * dim + j] * grad[j];
                }
                direction[i] = d;
            }
            for i in 0..dim {
                let eps = 1e-10 * (1.0 + v[i].abs());
                let at_lower = lower[i] > -UNBOUNDED && v[i] - lower[i] <= eps;
                let at_upper = upper[i] < UNBOUNDED && upper[i] - v[i] <= eps;
                if (at_lower && grad[i] > 0.0) || (at_upper && grad[i] < 0.0) {
                    direction[i] = 0.0;
                }
            }
            let mut slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
            if !(slope < 0.0) {
                // Fall back to projected steepest descent.
                for i in 0..dim {
                    direction[i] = -grad[i];
                }
                for i in 0..dim {
                    let eps = 1e-10 * (1.0 + v[i].abs());
                    let at_lower = lower[i] > -UNBOUNDED && v[i] - lower[i] <= eps;
                    let at_upper = upper[i] < UNBOUNDED && upper[i] - v[i] <= eps;
                    if (at_lower && grad[i] > 0.0) || (at_upper && grad[i] < 0.0) {
                        direction[i] = 0.0;
                    }
                }
                slope = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
                if !(slope < 0.0) {
                    break;
                }
            }

            // Backtracking Armijo line search along the projected path.
            let mut alpha = 1.0_f64;
            let mut accepted = false;
            for _ in 0..30 {
                for i in 0..dim {
                    trial[i] = v[i] + alpha * direction[i];
                }
                project(&mut trial, lower, upper);
                let m_trial = ws.merit(&trial);
                if m_trial <= merit + 1e-4 * alpha * slope {
                    merit = m_trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }

            ws.gradient(&mut trial, options.fd_step, &mut grad_next);

            // BFGS update of the inverse Hessian.
            let mut sy = 0.0;
            for i in 0..dim {
                sy += (trial[i] - v[i]) * (grad_next[i] - grad[i]);
            }
            let s_norm = crate::math::sqrt(
                (0..dim)
                    .map(|i| (trial[i] - v[i]) * (trial[i] - v[i]))
                    .sum::<f64>(),
            );
            let y_norm = crate::math::sqrt(
                (0..dim)
                    .map(|i| (grad_next[i] - grad[i]) * (grad_next[i] - grad[i]))
                    .sum::<f64>(),
            );
            if sy > 1e-12 * s_norm * y_norm {
                let s: Vec<f64> = (0..dim).map(|i| trial[i] - v[i]).collect();
                let y: Vec<f64> = (0..dim).map(|i| grad_next[i] - grad[i]).collect();
                let mut hy = vec![0.0; dim];
                for i in 0..dim {
                    let mut acc = 0.0;
                    for j in 0..dim {
                        acc += hessian_inv[i * dim + j] * y[j];
                    }
                    hy[i] = acc;
                }
                let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
                let c1 = (sy + yhy) / (sy * sy);
                for i in 0..dim {
                    for j in 0..dim {
                        hessian_inv[i * dim + j] +=
                            c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                    }
                }
            }

            v.copy_from_slice(&trial);
            grad.copy_from_slice(&grad_next);
        }

        // Measure constraints at the inner solution.
        (ws.eval)(&v, &mut ws.scratch);
        let violation = if ws.scratch.finite {
            ws.scratch.violation()
        } else {
            f64::INFINITY
        };

        if violation <= options.constraint_tol && last_pg <= options.kkt_tol {
            break;
        }

        // First-order multiplier updates.
        for (lam, h) in ws.lambda.iter_mut().zip(&ws.scratch.eq) {
            *lam += ws.rho * h;
        }
        for (mu, g) in ws.mu.iter_mut().zip(&ws.scratch.ineq) {
            *mu = (*mu + ws.rho * g).max(0.0);
        }
        if violation > 0.25 * prev_violation && violation > options.constraint_tol {
            ws.rho = (ws.rho * 10.0).min(1e12);
        }
        if violation > 0.99 * prev_violation && ws.rho >= 1e12 {
            stall_count += 1;
            if stall_count >= 3 {
                break;
            }
        } else {
            stall_count = 0;
        }
        prev_violation = violation;
        inner_tol = (inner_tol * 0.2).max(options.kkt_tol * 0.5);
    }

    (ws.eval)(&v, &mut ws.scratch);
    let violation = if ws.scratch.finite {
        ws.scratch.violation()
    } else {
        f64::INFINITY
    };
    let kkt = last_pg.max(violation);
    NlpResult {
        x: v,
        converged: violation <= options.constraint_tol.max(1e-8)
            && last_pg <= options.kkt_tol.max(1e-6),
        values: ws.scratch.clone(),
        kkt_residual: kkt,
        constraint_violation: violation,
        outer_iterations: outer_used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_quadratic() {
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective = (v[0] - 1.0).powi(2) + 2.0 * (v[1] + 0.5).powi(2);
            out.finite = true;
        };
        let r = solve(
            &eval,
            &[5.0, 5.0],
            &[-1e300, -1e300],
            &[1e300, 1e300],
            0,
            0,
            &NlpOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn box_active_at_solution() {
        // min (x+2)² on [0, 3] → x = 0.
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective = (v[0] + 2.0).powi(2);
            out.finite = true;
        };
        let r = solve(&eval, &[2.0], &[0.0], &[3.0], 0, 0, &NlpOptions::default());
        assert!(r.converged);
        assert_eq!(r.x[0], 0.0);
    }

    #[test]
    fn equality_constrained() {
        // min x² + y² s.t. x + y = 2 → (1, 1).
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective = v[0] * v[0] + v[1] * v[1];
            out.eq[0] = v[0] + v[1] - 2.0;
            out.finite = true;
        };
        let r = solve(
            &eval,
            &[0.0, 0.0],
            &[-1e300, -1e300],
            &[1e300, 1e300],
            1,
            0,
            &NlpOptions::default(),
        );
        assert!(r.converged, "violation {}", r.constraint_violation);
        assert!((r.x[0] - 1.0).abs() < 1e-6, "x = {:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inequality_constrained() {
        // min (x−3)² s.t. x ≤ 1 → x = 1, multiplier active.
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective = (v[0] - 3.0).powi(2);
            out.ineq[0] = v[0] - 1.0;
            out.finite = true;
        };
        let r = solve(&eval, &[0.0], &[-1e300], &[1e300], 0, 1, &NlpOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6, "x = {:?}", r.x);
    }

    #[test]
    fn rosenbrock_under_box() {
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective =
                100.0 * (v[1] - v[0] * v[0]).powi(2) + (1.0 - v[0]).powi(2);
            out.finite = true;
        };
        let r = solve(
            &eval,
            &[-1.2, 1.0],
            &[-2.0, -2.0],
            &[2.0, 2.0],
            0,
            0,
            &NlpOptions {
                max_inner: 400,
                ..NlpOptions::default()
            },
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4, "x = {:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infeasible_constraints_stall_without_panicking() {
        // x ≤ -1 and x ≥ 1 cannot both hold.
        let eval = |v: &[f64], out: &mut NlpValues| {
            out.objective = v[0] * v[0];
            out.ineq[0] = v[0] + 1.0; // v ≤ -1
            out.ineq[1] = 1.0 - v[0]; // v ≥ 1
            out.finite = true;
        };
        let r = solve(
            &eval,
            &[0.0],
            &[-1e300],
            &[1e300],
            0,
            2,
            &NlpOptions {
                max_outer: 40,
                ..NlpOptions::default()
            },
        );
        assert!(!r.converged);
        assert!(r.constraint_violation > 0.5);
    }
}
