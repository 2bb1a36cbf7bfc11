//! Greedy PRB scan: bundle consecutive PRBs for the best waiting VoLTE user,
//! hand PRBs that cannot complete a packet to a data user.

use alloc::vec;
use alloc::vec::Vec;

use super::{best_data_user, SchedulerState, TtiAllocation};
use crate::channel::BitsMatrix;
use crate::ratemap::VOLTE_PACKET_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicMode {
    /// Data PRBs go to the user with the most bits.
    MaxThroughput,
    /// Data PRBs go to the user with the largest `B / A_k`.
    ProportionalFair,
    /// Like `MaxThroughput`, but a PRB whose bundle fails is left unused.
    Baseline,
}

/// Schedules one TTI. `state` supplies the waiting VoLTE users and PF
/// averages and is not modified; apply the result with
/// [`SchedulerState::record_tti`].
///
/// With `strict` the bundle loop follows the original pseudocode: it keeps
/// adding PRBs while the bundle has at most 300 bits, and accepts the bundle
/// only if `n + n_PRBs <= N` (1-based), which rejects bundles that end on
/// the last PRB. Otherwise the loop stops as soon as 300 bits are reached
/// and any bundle that fits in the band is accepted.
///
/// `ops` is increased by the number of elementary steps: argmax candidates
/// examined, bundle extensions and outer iterations.
pub fn heuristic_tti(
    bits: &BitsMatrix,
    state: &SchedulerState,
    mode: HeuristicMode,
    strict: bool,
    ops: &mut u64,
) -> TtiAllocation {
    let num_prb = bits.num_prb();
    let num_volte = state.num_volte;
    let num_data = state.num_data;
    let weights = match mode {
        HeuristicMode::ProportionalFair => Some(state.pf_weights()),
        _ => None,
    };
    let mut waiting = state.remaining_volte.clone();
    let mut owner = vec![None; num_prb];
    let mut served = vec![false; num_volte];
    let packet = VOLTE_PACKET_BITS as u64;

    let give_to_data = |n: usize, owner: &mut [Option<usize>], ops: &mut u64| {
        *ops += num_data as u64;
        owner[n] = best_data_user(bits, num_volte, n, weights.as_deref());
    };

    let mut n = 0;
    while n < num_prb {
        *ops += 1;
        if waiting.is_empty() {
            give_to_data(n, &mut owner, ops);
            n += 1;
            continue;
        }
        *ops += waiting.len() as u64;
        let mut best = waiting[0];
        for &u in &waiting[1..] {
            if bits.get(n, u) > bits.get(n, best) {
                best = u;
            }
        }
        let mut acc = bits.get(n, best) as u64;
        let mut len = 1;
        let fits = if strict {
            // 1-based: n' = n + 1, loop while D <= 300 and n' + len <= N.
            while acc <= packet && n + 1 + len <= num_prb {
                *ops += 1;
                acc += bits.get(n + len, best) as u64;
                len += 1;
            }
            n + 1 + len <= num_prb
        } else {
            while acc < packet && n + len < num_prb {
                *ops += 1;
                acc += bits.get(n + len, best) as u64;
                len += 1;
            }
            acc >= packet
        };
        if fits {
            for o in &mut owner[n..n + len] {
                *o = Some(best);
            }
            served[best] = true;
            waiting.retain(|&u| u != best);
            n += len;
        } else {
            if mode != HeuristicMode::Baseline {
                give_to_data(n, &mut owner, ops);
            }
            n += 1;
        }
    }

    let mut data_bits_per_user = vec![0u64; num_data];
    for (n, o) in owner.iter().enumerate() {
        if let Some(u) = *o {
            if u >= num_volte {
                data_bits_per_user[u - num_volte] += bits.get(n, u) as u64;
            }
        }
    }
    let volte_served: Vec<usize> = (0..num_volte).filter(|&u| served[u]).collect();
    TtiAllocation {
        owner,
        y: served,
        data_bits_per_user,
        volte_served,
    }
}
