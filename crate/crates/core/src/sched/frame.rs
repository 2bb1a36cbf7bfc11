//! Frame-level program: every VoLTE user gets exactly one TTI of the frame,
//! data users share everything else.
//!
//! [`build_frame_program`] writes the program out in full, one `X` per
//! (PRB, user, TTI) and one `Y` per (user, TTI). The solver path uses an
//! equivalent, much smaller program:
//!
//! * data variables are eliminated: a PRB not taken by a VoLTE user goes to
//!   the data user with the most bits on it, so the objective becomes a
//!   constant minus the data bits displaced by VoLTE PRBs;
//! * with a single bits matrix the TTIs are interchangeable, so groups of
//!   VoLTE users can be relabelled to TTIs in the order of their lowest
//!   member; user `u` then only needs TTIs `0..=u`;
//! * each serve variable gets a cover row `Σ_n X ≥ m_u Y`, `m_u` being the
//!   fewest PRBs that can carry a packet for `u`;
//! * when `U ≤ T` every user can have a TTI of its own, and the program
//!   splits into one small program per user.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::heuristic::{heuristic_tti, HeuristicMode};
use super::{
    best_data_user, check_dims, min_prbs_for_packet, FrameAllocation, FrameStatus, SchedulerState,
    TtiAllocation, DEFAULT_GAMMA,
};
use crate::bip::{
    solve_branch_and_bound_from, solve_lp_relaxation, BinaryProgram, Budget, LpStatus, Row,
    SolveStatus, VarLabel,
};
use crate::channel::BitsMatrix;
use crate::ratemap::VOLTE_PACKET_BITS;
use crate::Error;

/// The full frame-level program.
///
/// Variable order: `X[n][u][t]` at `(t·N + n)·(U+K) + u`, then `Y[u][t]`
/// at `N·(U+K)·T + t·U + u`. The objective counts data bits only. Rows:
/// one PRB owner per (PRB, TTI), relaxed to "at most one" when `K = 0`;
/// `Σ_t Y[u][t] = 1`; and `Σ_n B[n][u]·X[n][u][t] − 300·Y[u][t] ≥ 0`.
pub fn build_frame_program(
    bits: &BitsMatrix,
    num_volte: usize,
    num_data: usize,
    num_tti: usize,
) -> Result<BinaryProgram, Error> {
    if bits.num_users() != num_volte + num_data {
        return Err(Error::DimensionMismatch);
    }
    let n_prb = bits.num_prb();
    let n_users = num_volte + num_data;
    let x = |n: usize, u: usize, t: usize| (t * n_prb + n) * n_users + u;
    let y_base = n_prb * n_users * num_tti;
    let y = |u: usize, t: usize| y_base + t * num_volte + u;

    let mut objective = vec![0.0; y_base + num_volte * num_tti];
    let mut labels = Vec::with_capacity(objective.len());
    for t in 0..num_tti {
        for n in 0..n_prb {
            for u in 0..n_users {
                if u >= num_volte {
                    objective[x(n, u, t)] = bits.get(n, u) as f64;
                }
                labels.push(VarLabel::Assign { prb: n, user: u, tti: t });
            }
        }
    }
    for t in 0..num_tti {
        for u in 0..num_volte {
            labels.push(VarLabel::Serve { user: u, tti: t });
        }
    }
    let mut p = BinaryProgram::new(objective);
    p.labels = labels;
    for t in 0..num_tti {
        for n in 0..n_prb {
            let row = Row::new((0..n_users).map(|u| (x(n, u, t), 1.0)).collect(), 1.0);
            if num_data == 0 {
                p.add_le(row);
            } else {
                p.add_eq(row);
            }
        }
    }
    for u in 0..num_volte {
        p.add_eq(Row::new((0..num_tti).map(|t| (y(u, t), 1.0)).collect(), 1.0));
    }
    for t in 0..num_tti {
        for u in 0..num_volte {
            let mut terms: Vec<(usize, f64)> = (0..n_prb)
                .map(|n| (x(n, u, t), bits.get(n, u) as f64))
                .collect();
            terms.push((y(u, t), -(VOLTE_PACKET_BITS as f64)));
            p.add_ge(Row::new(terms, 0.0));
        }
    }
    Ok(p)
}

/// Variable count of the program the solver path works on (before PRBs
/// with zero bits are dropped). Size caps are checked against this.
pub fn frame_program_vars(num_prb: usize, num_volte: usize, num_tti: usize, per_tti_fading: bool) -> usize {
    if per_tti_fading {
        num_volte * num_tti * (num_prb + 1)
    } else {
        // User u may use TTIs 0..=min(u, T-1).
        (0..num_volte).map(|u| (u.min(num_tti.saturating_sub(1)) + 1) * (num_prb + 1)).sum::<usize>()
            * usize::from(num_tti > 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSolution {
    pub status: SolveStatus,
    /// Decoded allocation: optimal, or the incumbent on timeout.
    pub allocation: Option<FrameAllocation>,
    /// Data bits of `allocation`, `-inf` when there is none.
    pub objective: f64,
    /// Proven upper bound on the optimal data bits.
    pub best_bound: f64,
    pub nodes: u64,
}

/// Solves the frame-level program. `bits` holds one matrix (block fading)
/// or one per TTI.
pub fn schedule_frame_optimal(
    bits: &[BitsMatrix],
    num_volte: usize,
    num_tti: usize,
    budget: &mut dyn Budget,
) -> Result<FrameSolution, Error> {
    let first = bits.first().ok_or(Error::EmptyInput)?;
    if bits.len() != 1 && bits.len() != num_tti {
        return Err(Error::DimensionMismatch);
    }
    check_dims(first, num_volte)?;
    if bits
        .iter()
        .any(|b| b.num_users() != first.num_users() || b.num_prb() != first.num_prb())
    {
        return Err(Error::DimensionMismatch);
    }
    if num_volte > 0 && num_tti == 0 {
        return Ok(infeasible(0));
    }
    let tti_bits = |t: usize| &bits[t % bits.len()];
    let constant: f64 = (0..num_tti)
        .map(|t| data_gain(tti_bits(t), num_volte).iter().map(|&b| b as f64).sum::<f64>())
        .sum();

    // (user, tti) -> PRBs, for the VoLTE part of the schedule.
    let mut volte_prbs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let status;
    let mut cost = 0.0;
    let mut cost_bound = 0.0;
    let mut nodes = 0;

    if bits.len() == 1 && num_volte <= num_tti {
        let mut all_optimal = true;
        for u in 0..num_volte {
            let Some(p) = reduced_program(bits, &[u], num_volte, 1, true) else {
                return Ok(infeasible(nodes));
            };
            let out = solve_branch_and_bound_from(&p, budget, None);
            nodes += out.nodes;
            match out.status {
                SolveStatus::Infeasible => return Ok(infeasible(nodes)),
                SolveStatus::Timeout if out.assignment.is_none() => {
                    return Ok(timeout_without_incumbent(constant - cost_bound + out.best_bound, nodes));
                }
                SolveStatus::Timeout => all_optimal = false,
                SolveStatus::Optimal => {}
            }
            cost -= out.objective_value;
            cost_bound -= out.best_bound;
            for (prb, _, _) in chosen_assignments(&p, out.assignment.as_deref().unwrap_or(&[])) {
                volte_prbs.entry((u, u)).or_default().push(prb);
            }
        }
        status = if all_optimal { SolveStatus::Optimal } else { SolveStatus::Timeout };
    } else {
        let users: Vec<usize> = (0..num_volte).collect();
        let symmetric = bits.len() == 1;
        let Some(p) = reduced_program(bits, &users, num_volte, num_tti, symmetric) else {
            return Ok(infeasible(0));
        };
        let seed = heuristic_seed(bits, num_volte, num_tti, symmetric, &p);
        let out = solve_branch_and_bound_from(&p, budget, seed.as_deref());
        nodes = out.nodes;
        match out.status {
            SolveStatus::Infeasible => return Ok(infeasible(nodes)),
            SolveStatus::Timeout if out.assignment.is_none() => {
                return Ok(timeout_without_incumbent(constant + out.best_bound, nodes));
            }
            s => status = s,
        }
        cost = -out.objective_value;
        cost_bound = -out.best_bound;
        for (prb, user, tti) in chosen_assignments(&p, out.assignment.as_deref().unwrap_or(&[])) {
            volte_prbs.entry((user, tti)).or_default().push(prb);
        }
    }

    let n_prb = first.num_prb();
    let mut per_tti = Vec::with_capacity(num_tti);
    for t in 0..num_tti {
        let b = tti_bits(t);
        let mut owner: Vec<Option<usize>> = vec![None; n_prb];
        for ((u, tt), prbs) in &volte_prbs {
            if *tt == t {
                for &n in prbs {
                    owner[n] = Some(*u);
                }
            }
        }
        for (n, o) in owner.iter_mut().enumerate() {
            if o.is_none() {
                *o = best_data_user(b, num_volte, n, None);
            }
        }
        per_tti.push(TtiAllocation::from_owners(b, num_volte, owner));
    }
    let frame_status = if status == SolveStatus::Optimal {
        FrameStatus::Scheduled
    } else {
        FrameStatus::Timeout
    };
    let allocation = FrameAllocation::new(frame_status, per_tti, bits, num_volte);
    let objective = allocation.data_bits() as f64;
    // Stray PRBs of an incumbent can only raise the decoded value.
    debug_assert!(objective >= constant - cost - 0.5);
    debug_assert_eq!(allocation.volte_served_count(), num_volte);
    Ok(FrameSolution {
        status,
        best_bound: if status == SolveStatus::Optimal {
            objective
        } else {
            constant - cost_bound
        },
        allocation: Some(allocation),
        objective,
        nodes,
    })
}

/// LP relaxation of [`build_frame_program`]: an upper bound on the frame's
/// data bits, or `None` when even the relaxation is infeasible.
pub fn schedule_frame_relaxed_bound(
    bits: &BitsMatrix,
    num_volte: usize,
    num_data: usize,
    num_tti: usize,
) -> Result<Option<f64>, Error> {
    let p = build_frame_program(bits, num_volte, num_data, num_tti)?;
    let lp = solve_lp_relaxation(&p);
    match lp.status {
        LpStatus::Optimal => Ok(Some(lp.objective)),
        LpStatus::Infeasible => Ok(None),
        LpStatus::IterationLimit => Err(Error::IterationLimit),
    }
}

fn infeasible(nodes: u64) -> FrameSolution {
    FrameSolution {
        status: SolveStatus::Infeasible,
        allocation: None,
        objective: f64::NEG_INFINITY,
        best_bound: f64::NEG_INFINITY,
        nodes,
    }
}

fn timeout_without_incumbent(best_bound: f64, nodes: u64) -> FrameSolution {
    FrameSolution {
        status: SolveStatus::Timeout,
        allocation: None,
        objective: f64::NEG_INFINITY,
        best_bound,
        nodes,
    }
}

/// Bits of the best data user on each PRB; zeros when there are none.
pub(crate) fn data_gain(bits: &BitsMatrix, num_volte: usize) -> Vec<u32> {
    (0..bits.num_prb())
        .map(|n| bits.prb_row(n)[num_volte..].iter().copied().max().unwrap_or(0))
        .collect()
}

/// Reduced program over `users`, with objective `-Σ b_n X` (the data bits
/// displaced). Returns `None` if some user cannot be served in any TTI.
fn reduced_program(
    bits: &[BitsMatrix],
    users: &[usize],
    num_volte: usize,
    num_tti: usize,
    symmetric: bool,
) -> Option<BinaryProgram> {
    let n_prb = bits[0].num_prb();
    let used_ttis = if symmetric { num_tti.min(users.len()) } else { num_tti };
    let mut objective = Vec::new();
    let mut labels = Vec::new();
    // Per (slot, tti): serve var, X vars (prb, var).
    let mut blocks: Vec<(usize, usize, usize, Vec<(usize, usize)>)> = Vec::new();
    let mut serve_vars: Vec<Vec<usize>> = vec![Vec::new(); users.len()];

    for t in 0..used_ttis {
        let b = &bits[t % bits.len()];
        let gain = data_gain(b, num_volte);
        for (slot, &u) in users.iter().enumerate() {
            if symmetric && t > slot {
                continue;
            }
            if min_prbs_for_packet(b, u).is_none() {
                continue;
            }
            let yv = objective.len();
            objective.push(0.0);
            labels.push(VarLabel::Serve { user: u, tti: t });
            serve_vars[slot].push(yv);
            let mut xs = Vec::new();
            for n in 0..n_prb {
                if b.get(n, u) > 0 {
                    xs.push((n, objective.len()));
                    objective.push(-(gain[n] as f64));
                    labels.push(VarLabel::Assign { prb: n, user: u, tti: t });
                }
            }
            blocks.push((slot, t, yv, xs));
        }
    }
    if serve_vars.iter().any(Vec::is_empty) {
        return None;
    }

    let mut p = BinaryProgram::new(objective);
    p.labels = labels;
    for vars in &serve_vars {
        p.add_eq(Row::new(vars.iter().map(|&v| (v, 1.0)).collect(), 1.0));
    }
    for &(slot, t, yv, ref xs) in &blocks {
        let u = users[slot];
        let b = &bits[t % bits.len()];
        let m = min_prbs_for_packet(b, u).unwrap_or(0) as f64;
        let mut knap: Vec<(usize, f64)> = xs.iter().map(|&(n, v)| (v, b.get(n, u) as f64)).collect();
        knap.push((yv, -(VOLTE_PACKET_BITS as f64)));
        p.add_ge(Row::new(knap, 0.0));
        let mut cover: Vec<(usize, f64)> = xs.iter().map(|&(_, v)| (v, 1.0)).collect();
        cover.push((yv, -m));
        p.add_ge(Row::new(cover, 0.0));
    }
    for t in 0..used_ttis {
        let mut per_prb: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_prb];
        for (_, _, _, xs) in blocks.iter().filter(|blk| blk.1 == t) {
            for &(n, v) in xs {
                per_prb[n].push((v, 1.0));
            }
        }
        for terms in per_prb.into_iter().filter(|ts| ts.len() > 1) {
            p.add_le(Row::new(terms, 1.0));
        }
    }
    Some(p)
}

/// `(prb, user, tti)` of every chosen X whose serve variable is also set.
fn chosen_assignments(p: &BinaryProgram, x: &[bool]) -> Vec<(usize, usize, usize)> {
    if x.is_empty() {
        return Vec::new();
    }
    let served: Vec<(usize, usize)> = p
        .labels
        .iter()
        .zip(x)
        .filter_map(|(l, &on)| match (l, on) {
            (VarLabel::Serve { user, tti }, true) => Some((*user, *tti)),
            _ => None,
        })
        .collect();
    p.labels
        .iter()
        .zip(x)
        .filter_map(|(l, &on)| match (l, on) {
            (VarLabel::Assign { prb, user, tti }, true) if served.contains(&(*user, *tti)) => {
                Some((*prb, *user, *tti))
            }
            _ => None,
        })
        .collect()
}

/// Starting point from the max-throughput heuristic, if it serves every
/// VoLTE user within the frame.
fn heuristic_seed(
    bits: &[BitsMatrix],
    num_volte: usize,
    num_tti: usize,
    symmetric: bool,
    p: &BinaryProgram,
) -> Option<Vec<bool>> {
    let num_data = bits[0].num_users() - num_volte;
    let mut state = SchedulerState::new(num_volte, num_data, DEFAULT_GAMMA).ok()?;
    let mut frame = Vec::with_capacity(num_tti);
    for t in 0..num_tti {
        let a = heuristic_tti(&bits[t % bits.len()], &state, HeuristicMode::MaxThroughput, false, &mut 0);
        state.record_tti(&a);
        frame.push(a);
    }
    if !state.remaining_volte.is_empty() {
        return None;
    }
    // Relabel TTIs by their lowest served user when TTIs are interchangeable.
    let mut order: Vec<usize> = (0..num_tti).filter(|&t| !frame[t].volte_served.is_empty()).collect();
    if symmetric {
        order.sort_by_key(|&t| frame[t].volte_served[0]);
    }
    let mut index = BTreeMap::new();
    for (i, l) in p.labels.iter().enumerate() {
        index.insert(*l, i);
    }
    let mut x = vec![false; p.num_vars];
    for (slot, &t) in order.iter().enumerate() {
        let tt = if symmetric { slot } else { t };
        for &u in &frame[t].volte_served {
            *index.get(&VarLabel::Serve { user: u, tti: tt }).map(|&i| &mut x[i])? = true;
        }
        for (n, o) in frame[t].owner.iter().enumerate() {
            if let Some(u) = *o {
                if let Some(&i) = index.get(&VarLabel::Assign { prb: n, user: u, tti: tt }) {
                    x[i] = true;
                }
            }
        }
    }
    Some(x)
}
