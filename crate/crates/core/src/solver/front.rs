//! Pareto front approximation, ideal points, and dominance filtering.

use alloc::vec::Vec;

use super::{
    solve_scalarized, EfficientSolution, FrontApproximation, MooProblem, Scalarizer, SolverOptions,
};
use crate::dynamics::ControlSequence;
use crate::error::{Error, Result};
use crate::math;

/// True when `a` dominates `b` beyond the tolerance: `a_i ≤ b_i + eps`
/// in every component and `a_j < b_j − eps` in at least one.
pub fn dominates(a: &[f64], b: &[f64], eps: f64) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if *x > y + eps {
            return false;
        }
        if *x < y - eps {
            strict = true;
        }
    }
    strict
}

fn eps_equal(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| math::abs(x - y) <= eps)
}

/// Indices of the maximal nondominated subset, in input order.
///
/// A point is dropped only when a *retained* point dominates it (or
/// equals it within `eps`; ties keep the first occurrence), so every
/// dropped point is covered by some kept point. With strict dominance
/// this is the classical maximal nondominated subset; the kept-point
/// rule additionally keeps the output nonempty on clusters of
/// `eps`-close points, where tolerance dominance is not a partial
/// order.
pub fn dominance_filter(points: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        let covered = kept
            .iter()
            .any(|&j| dominates(&points[j], &points[i], eps) || eps_equal(&points[j], &points[i], eps));
        if covered {
            continue;
        }
        // The new point may in turn dominate earlier kept ones.
        kept.retain(|&j| !dominates(&points[i], &points[j], eps));
        kept.push(i);
    }
    kept
}

/// Replaces or inserts the bound for objective `i`, keeping the tighter
/// value when one is already present.
fn merge_bound(bounds: &[(usize, f64)], i: usize, value: f64) -> Vec<(usize, f64)> {
    let mut out = bounds.to_vec();
    if let Some(entry) = out.iter_mut().find(|(j, _)| *j == i) {
        entry.1 = entry.1.min(value);
    } else {
        out.push((i, value));
    }
    out
}

/// Minimizes objective `i` over the bound-constrained feasible set and
/// returns the cleaned solution together with the attained minimum.
fn extremal_with_value(
    p: &MooProblem,
    i: usize,
    opts: &SolverOptions,
    warm: Option<&ControlSequence>,
) -> Result<(EfficientSolution, f64)> {
    let sol = solve_scalarized(p, Scalarizer::SingleObjective { index: i }, warm, opts)?;
    let value = sol.cost[i];
    let s = p.num_objectives();

    // Extremal scalarizations only guarantee weak efficiency, so a
    // second pass minimizes the remaining objectives subject to the
    // attained value.
    let eps_lex = 1e-7 * (1.0 + math::abs(value));
    let bounded = p
        .clone()
        .with_bounds(merge_bound(p.cost_upper_bounds(), i, value + eps_lex))?;
    let mut weights = alloc::vec![1.0; s];
    weights[i] = 0.0;
    match solve_scalarized(
        &bounded,
        Scalarizer::WeightedSum { weights },
        Some(&sol.controls),
        opts,
    ) {
        Ok(mut cleaned) => {
            cleaned.tag = super::ScalarizationTag::SingleObjective { index: i };
            Ok((cleaned, value))
        }
        Err(_) => Ok((sol, value)),
    }
}

/// Lexicographic minimization of objective `i`: the extremal solve with
/// a clean-up pass over the remaining objectives.
pub fn solve_extremal(
    p: &MooProblem,
    i: usize,
    opts: &SolverOptions,
    warm: Option<&ControlSequence>,
) -> Result<EfficientSolution> {
    extremal_with_value(p, i, opts, warm).map(|(sol, _)| sol)
}

/// The ideal point: component `i` is the minimum of `J_i^N` over the
/// bound-constrained feasible set.
pub fn ideal_point(
    p: &MooProblem,
    opts: &SolverOptions,
    warm: Option<&ControlSequence>,
) -> Result<Vec<f64>> {
    (0..p.num_objectives())
        .map(|i| {
            solve_scalarized(p, Scalarizer::SingleObjective { index: i }, warm, opts)
                .map(|sol| sol.cost[i])
        })
        .collect()
}

/// Approximates the nondominated set.
///
/// Extremal points are computed first; scalarized cone subproblems are
/// then placed by bisecting the largest gap between attained points (for
/// two objectives) or the largest nearest-neighbor gap (for three),
/// until the budget is exhausted or every gap falls below the threshold.
/// When a warm start is supplied, one subproblem is anchored at its cost
/// vector so that some returned point weakly dominates it.
pub fn approximate_front(
    p: &MooProblem,
    budget: usize,
    gap_threshold: f64,
    opts: &SolverOptions,
    warm: Option<&ControlSequence>,
) -> Result<FrontApproximation> {
    if budget < 2 {
        return Err(Error::InvalidConfig("front budget must be at least 2"));
    }
    let s = p.num_objectives();
    if s > 3 {
        return Err(Error::InvalidConfig(
            "front approximation is implemented for 2 or 3 objectives",
        ));
    }

    let mut solutions: Vec<EfficientSolution> = Vec::new();
    let mut ideal = alloc::vec![f64::INFINITY; s];
    let mut used = 0usize;
    for i in 0..s.min(budget) {
        match extremal_with_value(p, i, opts, warm) {
            Ok((sol, value)) => {
                ideal[i] = value;
                solutions.push(sol);
            }
            Err(Error::BoundSetInfeasible) => {
                return Ok(FrontApproximation {
                    points: Vec::new(),
                    ideal: None,
                });
            }
            Err(e) => return Err(e),
        }
        used += 1;
    }
    let have_ideal = used == s;

    // Collapsed front: all extremal values coincide.
    let diameter = solutions
        .iter()
        .flat_map(|a| solutions.iter().map(move |b| math::dist_inf(&a.cost, &b.cost)))
        .fold(0.0, f64::max);
    if diameter <= opts.dominance_tol || used < s {
        let points = filter_sorted(solutions, opts.dominance_tol);
        return Ok(FrontApproximation {
            points,
            ideal: have_ideal.then_some(ideal),
        });
    }

    // Cone direction: the normalized ideal-to-nadir diagonal.
    let mut nadir = alloc::vec![f64::NEG_INFINITY; s];
    for sol in &solutions {
        for (n, c) in nadir.iter_mut().zip(&sol.cost) {
            *n = n.max(*c);
        }
    }
    let mut direction: Vec<f64> = nadir.iter().zip(&ideal).map(|(n, z)| n - z).collect();
    let norm = math::norm2(&direction);
    for d in direction.iter_mut() {
        *d = (*d / norm).max(1e-9);
    }

    // One subproblem anchored at the warm start's cost vector.
    if let Some(w) = warm {
        if used < budget {
            if let Ok((wcost, viol)) = super::evaluate_controls(p, w) {
                if viol <= opts.feasibility_tol {
                    used += 1;
                    if let Ok(sol) = solve_scalarized(
                        p,
                        Scalarizer::PascolettiSerafini {
                            reference: wcost,
                            direction: direction.clone(),
                        },
                        Some(w),
                        opts,
                    ) {
                        solutions.push(sol);
                    }
                }
            }
        }
    }

    let mut attempted: Vec<Vec<f64>> = Vec::new();
    while used < budget {
        let Some((reference, warm_idx, gap)) = next_gap(&solutions, s) else {
            break;
        };
        if gap <= gap_threshold {
            break;
        }
        let scale = 1.0 + math::norm2(&reference);
        if attempted
            .iter()
            .any(|r| math::dist2(r, &reference) <= 1e-9 * scale)
        {
            break;
        }
        attempted.push(reference.clone());
        used += 1;
        if let Ok(sol) = solve_scalarized(
            p,
            Scalarizer::PascolettiSerafini {
                reference,
                direction: direction.clone(),
            },
            Some(&solutions[warm_idx].controls),
            opts,
        ) {
            solutions.push(sol);
        }
    }

    let points = filter_sorted(solutions, opts.dominance_tol);
    Ok(FrontApproximation {
        points,
        ideal: have_ideal.then_some(ideal),
    })
}

/// Picks the next reference point: the midpoint of the largest gap
/// between adjacent attained cost vectors (sorted by the first objective
/// for two objectives, nearest neighbors for three). Returns the
/// reference, the index of the solution to warm start from, and the gap.
fn next_gap(solutions: &[EfficientSolution], s: usize) -> Option<(Vec<f64>, usize, f64)> {
    if solutions.len() < 2 {
        return None;
    }
    let mut best: Option<(usize, usize, f64)> = None;
    if s == 2 {
        let mut order: Vec<usize> = (0..solutions.len()).collect();
        order.sort_by(|&a, &b| {
            solutions[a].cost[0]
                .partial_cmp(&solutions[b].cost[0])
                .expect("finite costs")
        });
        for w in order.windows(2) {
            let gap = math::dist2(&solutions[w[0]].cost, &solutions[w[1]].cost);
            if best.map_or(true, |(_, _, g)| gap > g) {
                best = Some((w[0], w[1], gap));
            }
        }
    } else {
        // Largest nearest-neighbor distance.
        for i in 0..solutions.len() {
            let mut nn: Option<(usize, f64)> = None;
            for j in 0..solutions.len() {
                if i == j {
                    continue;
                }
                let d = math::dist2(&solutions[i].cost, &solutions[j].cost);
                if nn.map_or(true, |(_, dn)| d < dn) {
                    nn = Some((j, d));
                }
            }
            if let Some((j, d)) = nn {
                if best.map_or(true, |(_, _, g)| d > g) {
                    best = Some((i, j, d));
                }
            }
        }
    }
    best.map(|(i, j, gap)| {
        let mid: Vec<f64> = solutions[i]
            .cost
            .iter()
            .zip(&solutions[j].cost)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        (mid, i, gap)
    })
}

/// Sorts by the first objective and keeps the nondominated subset.
fn filter_sorted(mut solutions: Vec<EfficientSolution>, eps: f64) -> Vec<EfficientSolution> {
    solutions.sort_by(|a, b| {
        a.cost
            .partial_cmp(&b.cost)
            .expect("finite costs are totally ordered")
    });
    let costs: Vec<Vec<f64>> = solutions.iter().map(|sol| sol.cost.clone()).collect();
    let kept = dominance_filter(&costs, eps);
    let mut keep_flags = alloc::vec![false; solutions.len()];
    for i in kept {
        keep_flags[i] = true;
    }
    let mut out = Vec::new();
    for (sol, keep) in solutions.into_iter().zip(keep_flags) {
        if keep {
            out.push(sol);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_basics() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0], 1e-9));
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0], 1e-9));
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0], 1e-9));
    }

    #[test]
    fn filter_keeps_incomparable_points() {
        let pts = alloc::vec![alloc::vec![1.0, 2.0], alloc::vec![2.0, 1.0]];
        assert_eq!(dominance_filter(&pts, 1e-6), alloc::vec![0, 1]);
    }

    #[test]
    fn filter_drops_duplicates_and_dominated() {
        let pts = alloc::vec![
            alloc::vec![1.0, 2.0],
            alloc::vec![1.0, 2.0],
            alloc::vec![2.0, 3.0]
        ];
        assert_eq!(dominance_filter(&pts, 1e-6), alloc::vec![0]);
    }

    #[test]
    fn filter_matches_quadratic_oracle_on_random_clouds() {
        // Independent count-based oracle over deterministic pseudo-random
        // clouds, including quantized coordinates that force ties.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for cloud in 0..40 {
            let s = 2 + (cloud % 2);
            let n = 5 + (cloud * 7) % 120;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..s)
                        .map(|_| {
                            let v = next() * 4.0;
                            if cloud % 3 == 0 {
                                (v * 8.0).round() / 8.0
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect();
            let eps = 1e-9;
            let got = dominance_filter(&pts, eps);
            let mut want = Vec::new();
            for i in 0..pts.len() {
                let mut dominators = 0;
                for j in 0..pts.len() {
                    if j != i && dominates(&pts[j], &pts[i], eps) {
                        dominators += 1;
                    }
                }
                let mut earlier_equal = 0;
                for j in 0..i {
                    if pts[j]
                        .iter()
                        .zip(&pts[i])
                        .all(|(a, b)| (a - b).abs() <= eps)
                    {
                        earlier_equal += 1;
                    }
                }
                if dominators == 0 && earlier_equal == 0 {
                    want.push(i);
                }
            }
            assert_eq!(got, want, "cloud {cloud}");
        }
    }

    #[test]
    fn filter_output_is_externally_stable() {
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let a = (i * 37 % 50) as f64 / 10.0;
                let b = (i * 13 % 50) as f64 / 10.0;
                alloc::vec![a, b]
            })
            .collect();
        let kept = dominance_filter(&pts, 1e-9);
        for i in 0..pts.len() {
            if kept.contains(&i) {
                continue;
            }
            let covered = kept.iter().any(|&j| {
                dominates(&pts[j], &pts[i], 1e-9)
                    || pts[j]
                        .iter()
                        .zip(&pts[i])
                        .all(|(a, b)| (a - b).abs() <= 1e-9)
            });
            assert!(covered, "dropped point {i} not covered by a kept point");
        }
    }
}
