//! Brute-force enumeration of grid control sequences. Serves as a test
//! oracle for the scalarized solver and the front approximation, so it
//! deliberately shares no code with the shooting evaluator.

use alloc::vec;
use alloc::vec::Vec;

use super::{
    dominance_filter, EfficientSolution, FrontApproximation, MooProblem, ScalarizationTag,
    SolverOptions,
};
use crate::dynamics::ControlSequence;
use crate::error::{Error, Result};

/// Hard cap on the number of enumerated sequences.
pub const MAX_ENUMERATION: u64 = 1_000_000;

/// Enumerates every control sequence on a per-coordinate input grid,
/// keeps the ones that are admissible with a relaxed terminal tolerance
/// (and satisfy the problem's cost upper bounds), and returns the
/// nondominated subset.
///
/// Constraint violations are measured against the relaxed sets, so the
/// returned points carry violation 0.
pub fn brute_force_front(
    p: &MooProblem,
    grid_per_dim: usize,
    terminal_tol: f64,
    opts: &SolverOptions,
) -> Result<FrontApproximation> {
    if grid_per_dim < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points per dimension"));
    }
    let model = p.model();
    let obj = p.objectives();
    let n = model.state_dim();
    let m = model.input_dim();
    let big_n = p.horizon();
    let dims = big_n * m;
    let s = obj.num_objectives();

    let required = (grid_per_dim as u128)
        .checked_pow(dims as u32)
        .unwrap_or(u128::MAX);
    if required > MAX_ENUMERATION as u128 {
        return Err(Error::EnumerationBudgetExceeded {
            required,
            limit: MAX_ENUMERATION,
        });
    }

    // Grid values per flat control coordinate.
    let grid: Vec<Vec<f64>> = (0..dims)
        .map(|c| {
            let j = c % m;
            let lo = model.input_box().lower()[j];
            let hi = model.input_box().upper()[j];
            (0..grid_per_dim)
                .map(|g| lo + (hi - lo) * g as f64 / (grid_per_dim - 1) as f64)
                .collect()
        })
        .collect();

    let mut feasible: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut ideal = vec![f64::INFINITY; s];
    let mut indices = vec![0usize; dims];
    let mut states = vec![0.0; (big_n + 1) * n];
    let mut controls = vec![0.0; dims];

    loop {
        for (c, &g) in indices.iter().enumerate() {
            controls[c] = grid[c][g];
        }

        states[..n].copy_from_slice(p.x0());
        let mut finite = true;
        for k in 0..big_n {
            let (head, tail) = states.split_at_mut((k + 1) * n);
            model.step_into(&head[k * n..], &controls[k * m..(k + 1) * m], &mut tail[..n]);
            if tail[..n].iter().any(|x| !x.is_finite()) {
                finite = false;
                break;
            }
        }

        if finite {
            let mut state_ok = true;
            for k in 1..big_n {
                if model.state_box().violation(&states[k * n..(k + 1) * n])
                    > opts.feasibility_tol
                {
                    state_ok = false;
                    break;
                }
            }
            let terminal_ok =
                state_ok && model.terminal_distance(&states[big_n * n..]) <= terminal_tol;
            if state_ok && terminal_ok {
                let mut cost = vec![0.0; s];
                for (i, c) in cost.iter_mut().enumerate() {
                    for k in 0..big_n {
                        *c += obj.stage_cost(
                            i,
                            &states[k * n..(k + 1) * n],
                            &controls[k * m..(k + 1) * m],
                        );
                    }
                }
                cost[0] += obj.terminal_cost(&states[big_n * n..]);
                let bounds_ok = p
                    .cost_upper_bounds()
                    .iter()
                    .all(|&(i, b)| cost[i] <= b + opts.feasibility_tol);
                if bounds_ok && cost.iter().all(|c| c.is_finite()) {
                    for (z, c) in ideal.iter_mut().zip(&cost) {
                        *z = z.min(*c);
                    }
                    feasible.push((controls.clone(), cost));
                }
            }
        }

        // Odometer increment.
        let mut c = 0;
        loop {
            if c == dims {
                break;
            }
            indices[c] += 1;
            if indices[c] < grid_per_dim {
                break;
            }
            indices[c] = 0;
            c += 1;
        }
        if c == dims {
            break;
        }
    }

    if feasible.is_empty() {
        return Ok(FrontApproximation {
            points: Vec::new(),
            ideal: None,
        });
    }

    feasible.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite costs"));
    let costs: Vec<Vec<f64>> = feasible.iter().map(|(_, c)| c.clone()).collect();
    let kept = dominance_filter(&costs, opts.dominance_tol);
    let points = kept
        .into_iter()
        .map(|i| EfficientSolution {
            controls: ControlSequence::from_flat(&feasible[i].0, m),
            cost: feasible[i].1.clone(),
            tag: ScalarizationTag::Enumeration,
            kkt_residual: 0.0,
            constraint_violation: 0.0,
        })
        .collect();
    Ok(FrontApproximation {
        points,
        ideal: Some(ideal),
    })
}
