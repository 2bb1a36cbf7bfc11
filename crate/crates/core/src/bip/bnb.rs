//! Depth-first branch-and-bound over the LP relaxation.
//!
//! Branching picks the most fractional variable (lowest index on ties) and
//! explores the `= 1` child first. Nodes are pruned when their LP bound
//! cannot beat the incumbent; with an all-integer objective the bound is
//! rounded down first. Nonbasic variables whose reduced cost shows that
//! moving them off their bound cannot beat the incumbent are fixed for the
//! whole subtree. Every incumbent is re-checked against the original rows,
//! so a returned assignment is always feasible.

use alloc::vec;
use alloc::vec::Vec;

use super::simplex::{solve_with_fixings, LpStatus};
use super::{BinaryProgram, SolveOutcome, SolveStatus, INTEGRALITY_TOL};

/// Work budget checked before every node.
pub trait Budget {
    fn exhausted(&mut self) -> bool;
}

/// Never runs out.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&mut self) -> bool {
        false
    }
}

/// Allows a fixed number of nodes.
#[derive(Debug, Clone, Copy)]
pub struct NodeLimit(pub u64);

impl Budget for NodeLimit {
    fn exhausted(&mut self) -> bool {
        if self.0 == 0 {
            true
        } else {
            self.0 -= 1;
            false
        }
    }
}

impl<F: FnMut() -> bool> Budget for F {
    fn exhausted(&mut self) -> bool {
        self()
    }
}

pub fn solve_branch_and_bound(p: &BinaryProgram, budget: &mut dyn Budget) -> SolveOutcome {
    solve_branch_and_bound_from(p, budget, None)
}

/// Branch-and-bound seeded with a known assignment. An infeasible seed is
/// ignored.
pub fn solve_branch_and_bound_from(
    p: &BinaryProgram,
    budget: &mut dyn Budget,
    start: Option<&[bool]>,
) -> SolveOutcome {
    let integral = p.has_integral_objective();
    let mut incumbent: Option<(Vec<bool>, f64)> = start
        .filter(|x| p.is_feasible(x))
        .map(|x| (x.to_vec(), p.objective_value(x)));
    let beats = |bound: f64, inc: &Option<(Vec<bool>, f64)>| match inc {
        None => true,
        Some((_, best)) if integral => libm::floor(bound + INTEGRALITY_TOL) > *best + 0.5,
        Some((_, best)) => bound > *best + 1e-9,
    };

    let mut relaxation_bound = f64::NEG_INFINITY;
    let mut nodes = 0u64;
    let mut stack: Vec<(Vec<Option<bool>>, f64)> = vec![(vec![None; p.num_vars], f64::INFINITY)];

    while let Some((mut fixed, parent_bound)) = stack.pop() {
        if !beats(parent_bound, &incumbent) {
            continue;
        }
        if budget.exhausted() {
            stack.push((fixed, parent_bound));
            return timeout(incumbent, stack, relaxation_bound, nodes);
        }
        let lp = solve_with_fixings(p, &fixed);
        nodes += 1;
        let bound = match lp.status {
            LpStatus::Infeasible => {
                if nodes == 1 {
                    return SolveOutcome::infeasible(f64::NEG_INFINITY, nodes);
                }
                continue;
            }
            LpStatus::Optimal => lp.objective,
            LpStatus::IterationLimit => parent_bound,
        };
        if nodes == 1 {
            relaxation_bound = bound;
        }
        if !beats(bound, &incumbent) {
            continue;
        }

        let branch_var = if lp.status == LpStatus::Optimal {
            let rounded: Vec<bool> = lp.values.iter().map(|&v| v >= 0.5).collect();
            if p.is_feasible(&rounded) {
                let obj = p.objective_value(&rounded);
                if incumbent.as_ref().is_none_or(|(_, best)| obj > *best) {
                    incumbent = Some((rounded, obj));
                }
            }
            most_fractional(&lp.values, &fixed)
        } else {
            fixed.iter().position(Option::is_none)
        };
        // All free variables integral but the rounding failed the exact
        // check: keep splitting on a free variable.
        let branch_var = branch_var.or_else(|| {
            let rounded: Vec<bool> = lp.values.iter().map(|&v| v >= 0.5).collect();
            if lp.status == LpStatus::Optimal && p.is_feasible(&rounded) {
                None
            } else {
                fixed.iter().position(Option::is_none)
            }
        });
        if lp.status == LpStatus::Optimal && incumbent.is_some() {
            for j in 0..p.num_vars {
                if fixed[j].is_some() {
                    continue;
                }
                let d = lp.reduced_costs[j];
                let v = lp.values[j];
                if v <= INTEGRALITY_TOL && d < 0.0 && !beats(bound + d, &incumbent) {
                    fixed[j] = Some(false);
                } else if v >= 1.0 - INTEGRALITY_TOL && d > 0.0 && !beats(bound - d, &incumbent) {
                    fixed[j] = Some(true);
                }
            }
        }
        let Some(j) = branch_var else { continue };
        if fixed[j].is_some() {
            // Fixed just above; re-solve the node with the new fixings.
            stack.push((fixed, bound));
            continue;
        }
        let mut zero = fixed.clone();
        zero[j] = Some(false);
        let mut one = fixed;
        one[j] = Some(true);
        stack.push((zero, bound));
        stack.push((one, bound));
    }

    match incumbent {
        Some((x, obj)) => SolveOutcome {
            status: SolveStatus::Optimal,
            assignment: Some(x),
            objective_value: obj,
            relaxation_bound,
            best_bound: obj,
            nodes,
        },
        None => SolveOutcome::infeasible(relaxation_bound, nodes),
    }
}

/// Free variable closest to 0.5, if any is fractional.
fn most_fractional(values: &[f64], fixed: &[Option<bool>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in values.iter().enumerate() {
        if fixed[j].is_some() {
            continue;
        }
        let frac = v - libm::floor(v);
        if frac <= INTEGRALITY_TOL || frac >= 1.0 - INTEGRALITY_TOL {
            continue;
        }
        let dist = (frac - 0.5).abs();
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((j, dist));
        }
    }
    best.map(|b| b.0)
}

fn timeout(
    incumbent: Option<(Vec<bool>, f64)>,
    stack: Vec<(Vec<Option<bool>>, f64)>,
    relaxation_bound: f64,
    nodes: u64,
) -> SolveOutcome {
    let open = stack.iter().map(|n| n.1).fold(f64::NEG_INFINITY, f64::max);
    let (assignment, objective_value) = match incumbent {
        Some((x, v)) => (Some(x), v),
        None => (None, f64::NEG_INFINITY),
    };
    let best_bound = if nodes == 0 {
        f64::INFINITY
    } else {
        open.max(objective_value)
    };
    SolveOutcome {
        status: SolveStatus::Timeout,
        assignment,
        objective_value,
        relaxation_bound,
        best_bound,
        nodes,
    }
}
