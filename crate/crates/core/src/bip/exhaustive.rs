//! Brute-force oracle: walks all `2^n` assignments in Gray-code order,
//! updating row activities one flipped variable at a time.

use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryProgram, SolveOutcome, SolveStatus, FEASIBILITY_TOL};
use crate::Error;

pub const MAX_EXHAUSTIVE_VARS: usize = 25;

pub fn solve_exhaustive(p: &BinaryProgram) -> Result<SolveOutcome, Error> {
    p.validate()?;
    let n = p.num_vars;
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::TooManyVariables {
            num_vars: n,
            limit: MAX_EXHAUSTIVE_VARS,
        });
    }

    // Column view: for each variable, the rows it touches.
    let rows: Vec<(f64, bool)> = p
        .eq_rows
        .iter()
        .map(|r| (r.rhs, true))
        .chain(p.ge_rows.iter().map(|r| (r.rhs, false)))
        .collect();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, r) in p.eq_rows.iter().chain(&p.ge_rows).enumerate() {
        for &(j, c) in r.terms() {
            columns[j].push((i, c));
        }
    }
    let holds = |i: usize, act: f64| {
        let (rhs, is_eq) = rows[i];
        if is_eq {
            (act - rhs).abs() <= FEASIBILITY_TOL
        } else {
            act >= rhs - FEASIBILITY_TOL
        }
    };

    let mut activity = vec![0.0; rows.len()];
    let mut violated = (0..rows.len()).filter(|&i| !holds(i, 0.0)).count();
    let mut x = vec![false; n];
    let mut obj = 0.0;
    let mut best: Option<(u32, f64)> = (violated == 0).then_some((0, 0.0));
    let mut mask = 0u32;

    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let sign = if x[j] { -1.0 } else { 1.0 };
        x[j] = !x[j];
        mask ^= 1 << j;
        obj += sign * p.objective[j];
        for &(i, c) in &columns[j] {
            let before = holds(i, activity[i]);
            activity[i] += sign * c;
            let after = holds(i, activity[i]);
            match (before, after) {
                (true, false) => violated += 1,
                (false, true) => violated -= 1,
                _ => {}
            }
        }
        if violated == 0 && best.is_none_or(|(_, b)| obj > b) {
            best = Some((mask, obj));
        }
    }

    Ok(match best {
        Some((mask, _)) => {
            let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
            // Recompute from scratch so float drift along the walk does not
            // leak into the reported value.
            let obj = p.objective_value(&x);
            SolveOutcome {
                status: SolveStatus::Optimal,
                assignment: Some(x),
                objective_value: obj,
                relaxation_bound: f64::NAN,
                best_bound: obj,
                nodes: 1 << n,
            }
        }
        None => SolveOutcome::infeasible(f64::NAN, 1 << n),
    })
}
