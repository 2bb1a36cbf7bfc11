//! TTI-level two-phase scheduling. Phase one picks the largest set of
//! waiting VoLTE users that can all get a packet out this TTI; phase two
//! re-derives the PRB assignment for that set, maximising (weighted) data
//! bits.
//!
//! As in the frame-level solver, data variables are eliminated and each
//! VoLTE user gets a cover row; [`build_selection_program`] and
//! [`build_allocation_program`] give the programs written out in full.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::heuristic::{heuristic_tti, HeuristicMode};
use super::{best_data_user, check_dims, min_prbs_for_packet, SchedulerState, TtiAllocation, DEFAULT_GAMMA};
use crate::bip::{solve_branch_and_bound_from, BinaryProgram, Budget, Row, SolveStatus, VarLabel};
use crate::channel::BitsMatrix;
use crate::ratemap::VOLTE_PACKET_BITS;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TtiSolveStats {
    pub status: SolveStatus,
    pub nodes: u64,
}

/// Result of phase one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolteSelection {
    /// One entry per VoLTE user; `true` for users to serve this TTI.
    pub y: Vec<bool>,
    pub stats: TtiSolveStats,
    /// VoLTE PRB owners of the phase-one solution. Only ever used to warm
    /// start phase two, never as the final assignment.
    pub hint: Vec<Option<usize>>,
}

/// Largest phase-one variable count for `remaining` waiting users.
pub fn tti_program_vars(num_prb: usize, remaining: usize) -> usize {
    remaining * (num_prb + 1)
}

/// Phase one written out in full. Columns are the waiting VoLTE users
/// followed by all data users; `X[n][j]` sits at `n·C + j`, then one `Y`
/// per waiting user. Maximises `Σ Y` subject to one owner per PRB (at most
/// one when there are no data users) and `Σ_n B·X − 300·Y ≥ 0`.
pub fn build_selection_program(
    bits: &BitsMatrix,
    remaining: &[usize],
    num_volte: usize,
) -> Result<BinaryProgram, Error> {
    let num_data = check_dims(bits, num_volte)?;
    if remaining.iter().any(|&u| u >= num_volte) {
        return Err(Error::DimensionMismatch);
    }
    let cols: Vec<usize> = remaining.iter().copied().chain(num_volte..num_volte + num_data).collect();
    let n_prb = bits.num_prb();
    let c = cols.len();
    let y_base = n_prb * c;
    let mut objective = vec![0.0; y_base + remaining.len()];
    objective[y_base..].iter_mut().for_each(|v| *v = 1.0);
    let mut p = BinaryProgram::new(objective);
    for n in 0..n_prb {
        for &u in &cols {
            p.labels.push(VarLabel::Assign { prb: n, user: u, tti: 0 });
        }
    }
    for &u in remaining {
        p.labels.push(VarLabel::Serve { user: u, tti: 0 });
    }
    add_owner_rows(&mut p, n_prb, c, num_data == 0);
    for (i, &u) in remaining.iter().enumerate() {
        let mut terms: Vec<(usize, f64)> = (0..n_prb).map(|n| (n * c + i, bits.get(n, u) as f64)).collect();
        terms.push((y_base + i, -(VOLTE_PACKET_BITS as f64)));
        p.add_ge(Row::new(terms, 0.0));
    }
    Ok(p)
}

/// Phase two written out in full, with `Y` fixed by `y`. Columns are the
/// selected VoLTE users followed by all data users; `X[n][j]` sits at
/// `n·C + j`. Maximises `Σ_k w_k Σ_n B[n][U+k]·X[n][U+k]`.
pub fn build_allocation_program(bits: &BitsMatrix, y: &[bool], weights: &[f64]) -> Result<BinaryProgram, Error> {
    let num_volte = y.len();
    let num_data = check_dims(bits, num_volte)?;
    check_weights(weights, num_data)?;
    let selected: Vec<usize> = (0..num_volte).filter(|&u| y[u]).collect();
    let cols: Vec<usize> = selected.iter().copied().chain(num_volte..num_volte + num_data).collect();
    let n_prb = bits.num_prb();
    let c = cols.len();
    let mut objective = Vec::with_capacity(n_prb * c);
    let mut labels = Vec::with_capacity(n_prb * c);
    for n in 0..n_prb {
        for &u in &cols {
            objective.push(if u >= num_volte {
                weights[u - num_volte] * bits.get(n, u) as f64
            } else {
                0.0
            });
            labels.push(VarLabel::Assign { prb: n, user: u, tti: 0 });
        }
    }
    let mut p = BinaryProgram::new(objective);
    p.labels = labels;
    add_owner_rows(&mut p, n_prb, c, num_data == 0);
    for (i, &u) in selected.iter().enumerate() {
        let terms = (0..n_prb).map(|n| (n * c + i, bits.get(n, u) as f64)).collect();
        p.add_ge(Row::new(terms, VOLTE_PACKET_BITS as f64));
    }
    Ok(p)
}

fn add_owner_rows(p: &mut BinaryProgram, n_prb: usize, cols: usize, at_most: bool) {
    for n in 0..n_prb {
        let row = Row::new((0..cols).map(|j| (n * cols + j, 1.0)).collect(), 1.0);
        if at_most {
            p.add_le(row);
        } else {
            p.add_eq(row);
        }
    }
}

fn check_weights(weights: &[f64], num_data: usize) -> Result<(), Error> {
    if weights.len() != num_data {
        return Err(Error::DimensionMismatch);
    }
    if !weights.iter().all(|w| *w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidParameter("weights must be positive"));
    }
    Ok(())
}

struct Reduced {
    program: BinaryProgram,
    index: BTreeMap<VarLabel, usize>,
}

/// Reduced program over VoLTE users only: per user a serve variable (when
/// `with_serve`) and one `X` per PRB with nonzero bits. Rows: knapsack and
/// cover per user, at most one VoLTE owner per PRB. Users that can never
/// reach a packet get no variables.
fn reduced_program(bits: &BitsMatrix, users: &[usize], with_serve: bool, cost: &[f64]) -> Reduced {
    let n_prb = bits.num_prb();
    let mut objective = Vec::new();
    let mut labels = Vec::new();
    let mut blocks = Vec::new();
    for &u in users {
        let Some(m) = min_prbs_for_packet(bits, u) else { continue };
        let yv = with_serve.then(|| {
            objective.push(1.0);
            labels.push(VarLabel::Serve { user: u, tti: 0 });
            objective.len() - 1
        });
        let mut xs = Vec::new();
        for n in 0..n_prb {
            if bits.get(n, u) > 0 {
                xs.push((n, objective.len()));
                objective.push(-cost[n]);
                labels.push(VarLabel::Assign { prb: n, user: u, tti: 0 });
            }
        }
        blocks.push((u, m, yv, xs));
    }
    let mut p = BinaryProgram::new(objective);
    let packet = VOLTE_PACKET_BITS as f64;
    let mut per_prb: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_prb];
    for (u, m, yv, xs) in &blocks {
        let mut knap: Vec<(usize, f64)> = xs.iter().map(|&(n, v)| (v, bits.get(n, *u) as f64)).collect();
        let mut cover: Vec<(usize, f64)> = xs.iter().map(|&(_, v)| (v, 1.0)).collect();
        match yv {
            Some(yv) => {
                knap.push((*yv, -packet));
                cover.push((*yv, -(*m as f64)));
                p.add_ge(Row::new(knap, 0.0));
                p.add_ge(Row::new(cover, 0.0));
            }
            None => {
                p.add_ge(Row::new(knap, packet));
                p.add_ge(Row::new(cover, *m as f64));
            }
        }
        for &(n, v) in xs {
            per_prb[n].push((v, 1.0));
        }
    }
    for terms in per_prb.into_iter().filter(|t| t.len() > 1) {
        p.add_le(Row::new(terms, 1.0));
    }
    let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    p.labels = labels;
    Reduced { program: p, index }
}

/// Sets the variables of a PRB-owner vector that exist in the program.
fn seed_from_owners(r: &Reduced, owner: &[Option<usize>], serve: &[usize]) -> Vec<bool> {
    let mut x = vec![false; r.program.num_vars];
    for &u in serve {
        if let Some(&i) = r.index.get(&VarLabel::Serve { user: u, tti: 0 }) {
            x[i] = true;
        }
    }
    for (n, o) in owner.iter().enumerate() {
        if let Some(u) = *o {
            if let Some(&i) = r.index.get(&VarLabel::Assign { prb: n, user: u, tti: 0 }) {
                x[i] = true;
            }
        }
    }
    x
}

/// Greedy PRB sets for `users`, taking free PRBs by cost per bit until a
/// packet fits and then dropping PRBs no longer needed, most expensive
/// first. With `serve_all` the users needing the most PRBs pick first and
/// any failure gives `None`; otherwise the cheapest users pick first and
/// users that do not fit are skipped. Returns PRB owners and served users.
fn greedy_cover(
    bits: &BitsMatrix,
    users: &[usize],
    cost: &[f64],
    serve_all: bool,
) -> Option<(Vec<Option<usize>>, Vec<usize>)> {
    let n_prb = bits.num_prb();
    let packet = VOLTE_PACKET_BITS as u64;
    let mut order: Vec<(usize, usize)> = users
        .iter()
        .map(|&u| (u, min_prbs_for_packet(bits, u).unwrap_or(usize::MAX)))
        .collect();
    if serve_all {
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    } else {
        order.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    }
    let mut owner = vec![None; n_prb];
    let mut served = Vec::new();
    for (u, _) in order {
        let mut cand: Vec<usize> = (0..n_prb).filter(|&n| owner[n].is_none() && bits.get(n, u) > 0).collect();
        cand.sort_by(|&a, &b| {
            let ra = cost[a] / bits.get(a, u) as f64;
            let rb = cost[b] / bits.get(b, u) as f64;
            ra.total_cmp(&rb).then(bits.get(b, u).cmp(&bits.get(a, u))).then(a.cmp(&b))
        });
        let mut taken = Vec::new();
        let mut total = 0u64;
        for n in cand {
            if total >= packet {
                break;
            }
            total += bits.get(n, u) as u64;
            taken.push(n);
        }
        if total < packet {
            if serve_all {
                return None;
            }
            continue;
        }
        taken.sort_by(|&a, &b| cost[b].total_cmp(&cost[a]).then(bits.get(a, u).cmp(&bits.get(b, u))).then(a.cmp(&b)));
        for &n in &taken {
            let b = bits.get(n, u) as u64;
            if total - b >= packet {
                total -= b;
            } else {
                owner[n] = Some(u);
            }
        }
        served.push(u);
    }
    served.sort_unstable();
    Some((owner, served))
}

/// Phase one: maximise the number of waiting VoLTE users served this TTI.
/// Warm-started from the max-throughput heuristic; on timeout the best
/// selection found is returned.
pub fn tti_select_volte(
    bits: &BitsMatrix,
    remaining: &[usize],
    num_volte: usize,
    budget: &mut dyn Budget,
) -> Result<VolteSelection, Error> {
    let num_data = check_dims(bits, num_volte)?;
    if remaining.iter().any(|&u| u >= num_volte) {
        return Err(Error::DimensionMismatch);
    }
    let n_prb = bits.num_prb();
    let mut y = vec![false; num_volte];
    let mut hint = vec![None; n_prb];
    if remaining.is_empty() {
        let stats = TtiSolveStats { status: SolveStatus::Optimal, nodes: 0 };
        return Ok(VolteSelection { y, stats, hint });
    }

    let r = reduced_program(bits, remaining, true, &vec![0.0; n_prb]);
    let mut state = SchedulerState::new(num_volte, num_data, DEFAULT_GAMMA)?;
    state.remaining_volte = remaining.to_vec();
    let h = heuristic_tti(bits, &state, HeuristicMode::MaxThroughput, false, &mut 0);
    let mut seed = seed_from_owners(&r, &h.owner, &h.volte_served);
    if let Some((o, served)) = greedy_cover(bits, remaining, &vec![0.0; n_prb], false) {
        if served.len() > h.volte_served.len() {
            seed = seed_from_owners(&r, &o, &served);
        }
    }
    let out = solve_branch_and_bound_from(&r.program, budget, Some(&seed));
    let x = out.assignment.as_deref().unwrap_or(&seed);
    for (l, &on) in r.program.labels.iter().zip(x) {
        if let (VarLabel::Serve { user, .. }, true) = (l, on) {
            y[*user] = true;
        }
    }
    for (l, &on) in r.program.labels.iter().zip(x) {
        if let (VarLabel::Assign { prb, user, .. }, true) = (l, on) {
            if y[*user] {
                hint[*prb] = Some(*user);
            }
        }
    }
    let stats = TtiSolveStats { status: out.status, nodes: out.nodes };
    Ok(VolteSelection { y, stats, hint })
}

/// Phase two: assign PRBs so every selected VoLTE user gets a packet and
/// the weighted data bits are maximal. Unit weights give the throughput
/// objective, `1 / A_k` the proportional-fair one. PRBs left over by VoLTE
/// users go to the data user with the largest weighted bits.
pub fn tti_allocate(
    bits: &BitsMatrix,
    y: &[bool],
    weights: &[f64],
    budget: &mut dyn Budget,
    hint: Option<&[Option<usize>]>,
) -> Result<(TtiAllocation, TtiSolveStats), Error> {
    let num_volte = y.len();
    let num_data = check_dims(bits, num_volte)?;
    check_weights(weights, num_data)?;
    let n_prb = bits.num_prb();
    let selected: Vec<usize> = (0..num_volte).filter(|&u| y[u]).collect();
    let mut owner: Vec<Option<usize>> = vec![None; n_prb];
    let mut stats = TtiSolveStats { status: SolveStatus::Optimal, nodes: 0 };

    if !selected.is_empty() {
        if selected.iter().any(|&u| min_prbs_for_packet(bits, u).is_none()) {
            return Err(Error::PhaseContract);
        }
        let cost: Vec<f64> = (0..n_prb)
            .map(|n| best_data_user(bits, num_volte, n, Some(weights)).map_or(0.0, |k| weights[k - num_volte] * bits.get(n, k) as f64))
            .collect();
        let r = reduced_program(bits, &selected, false, &cost);
        // Start from the cheaper of the phase-one PRBs and a greedy cover.
        let seed = [
            hint.map(|h| seed_from_owners(&r, h, &[])),
            greedy_cover(bits, &selected, &cost, true).map(|(o, _)| seed_from_owners(&r, &o, &[])),
        ]
        .into_iter()
        .flatten()
        .filter(|x| r.program.is_feasible(x))
        .max_by(|a, b| r.program.objective_value(a).total_cmp(&r.program.objective_value(b)));
        let out = solve_branch_and_bound_from(&r.program, budget, seed.as_deref());
        stats = TtiSolveStats { status: out.status, nodes: out.nodes };
        let x = match (out.status, out.assignment) {
            (SolveStatus::Infeasible, _) => return Err(Error::PhaseContract),
            (_, Some(x)) => x,
            (_, None) => return Err(Error::BudgetExhausted),
        };
        for (l, on) in r.program.labels.iter().zip(x) {
            if let (VarLabel::Assign { prb, user, .. }, true) = (l, on) {
                owner[*prb] = Some(*user);
            }
        }
    }
    for (n, o) in owner.iter_mut().enumerate() {
        if o.is_none() {
            *o = best_data_user(bits, num_volte, n, Some(weights));
        }
    }
    let alloc = TtiAllocation::from_owners(bits, num_volte, owner);
    if alloc.y != y {
        return Err(Error::PhaseContract);
    }
    Ok((alloc, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bip::{solve_exhaustive, Unlimited};

    fn select(bits: &BitsMatrix, remaining: &[usize], u: usize) -> Vec<bool> {
        tti_select_volte(bits, remaining, u, &mut Unlimited).unwrap().y
    }

    #[test]
    fn nobody_waiting() {
        let b = BitsMatrix::from_rows(&[[666, 1]]).unwrap();
        assert_eq!(select(&b, &[], 1), vec![false]);
    }

    #[test]
    fn one_prb_one_user() {
        let b = BitsMatrix::from_rows(&[[666, 1]]).unwrap();
        assert_eq!(select(&b, &[0], 1), vec![true]);
        let ex = solve_exhaustive(&build_selection_program(&b, &[0], 1).unwrap()).unwrap();
        assert_eq!(ex.objective_value, 1.0);
    }

    #[test]
    fn two_users_two_prbs_each_needing_both() {
        let b = BitsMatrix::from_rows(&[[177, 177, 9], [177, 177, 9]]).unwrap();
        let y = select(&b, &[0, 1], 2);
        assert_eq!(y.iter().filter(|v| **v).count(), 1);
        let ex = solve_exhaustive(&build_selection_program(&b, &[0, 1], 2).unwrap()).unwrap();
        assert_eq!(ex.objective_value, 1.0);
    }

    #[test]
    fn allocation_without_volte() {
        let b = BitsMatrix::from_rows(&[[0, 10, 20], [0, 30, 5]]).unwrap();
        let (a, _) = tti_allocate(&b, &[false], &[1.0, 1.0], &mut Unlimited, None).unwrap();
        assert_eq!(a.owner, vec![Some(2), Some(1)]);
        assert_eq!(a.data_bits(), 50);
    }

    #[test]
    fn weights_dominate() {
        let b = BitsMatrix::from_rows(&[[40, 40], [50, 50]]).unwrap();
        let (a, _) = tti_allocate(&b, &[], &[1.0, 10.0], &mut Unlimited, None).unwrap();
        assert_eq!(a.owner, vec![Some(1), Some(1)]);
    }

    #[test]
    fn volte_bundle_and_data_remainder() {
        let b = BitsMatrix::from_rows(&[[177, 100], [177, 300], [177, 50]]).unwrap();
        let (a, _) = tti_allocate(&b, &[true], &[1.0], &mut Unlimited, None).unwrap();
        assert_eq!(a.owner, vec![Some(0), Some(1), Some(0)]);
        assert_eq!(a.data_bits(), 300);
        let p = build_allocation_program(&b, &[true], &[1.0]).unwrap();
        assert_eq!(solve_exhaustive(&p).unwrap().objective_value, 300.0);
    }

    #[test]
    fn contract_violation_is_reported() {
        let b = BitsMatrix::from_rows(&[[100, 1]]).unwrap();
        assert_eq!(
            tti_allocate(&b, &[true], &[1.0], &mut Unlimited, None),
            Err(Error::PhaseContract)
        );
    }

    #[test]
    fn bad_weights() {
        let b = BitsMatrix::from_rows(&[[1, 1]]).unwrap();
        assert!(tti_allocate(&b, &[false], &[0.0], &mut Unlimited, None).is_err());
        assert!(tti_allocate(&b, &[false], &[], &mut Unlimited, None).is_err());
    }

    #[test]
    fn phase_two_uses_hint() {
        let b = BitsMatrix::from_rows(&[[177, 10], [177, 20], [177, 30], [177, 40]]).unwrap();
        let sel = tti_select_volte(&b, &[0], 1, &mut Unlimited).unwrap();
        assert_eq!(sel.y, vec![true]);
        let (a, _) = tti_allocate(&b, &sel.y, &[1.0], &mut Unlimited, Some(&sel.hint)).unwrap();
        assert_eq!(a.owner, vec![Some(0), Some(0), Some(1), Some(1)]);
    }
}
