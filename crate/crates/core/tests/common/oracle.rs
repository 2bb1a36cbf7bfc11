//! Brute-force schedulers used as test oracles. They walk every PRB owner
//! map directly instead of going through a binary program.

#![allow(dead_code)]

use volte_core::channel::BitsMatrix;

const PACKET: u64 = 300;

/// Calls `f` on every owner vector of length `slots` over `choices`.
fn for_each_owner_map(slots: usize, choices: &[Option<usize>], mut f: impl FnMut(&[Option<usize>])) {
    let mut idx = vec![0usize; slots];
    let mut owner = vec![choices[0]; slots];
    loop {
        f(&owner);
        let mut i = 0;
        loop {
            if i == slots {
                return;
            }
            idx[i] += 1;
            if idx[i] < choices.len() {
                owner[i] = choices[idx[i]];
                break;
            }
            idx[i] = 0;
            owner[i] = choices[0];
            i += 1;
        }
    }
}

fn choices(num_users: usize, num_data: usize) -> Vec<Option<usize>> {
    // With data users every PRB must have an owner; without, PRBs may idle.
    let mut c: Vec<Option<usize>> = (0..num_users).map(Some).collect();
    if num_data == 0 {
        c.insert(0, None);
    }
    c
}

/// Best frame data throughput over all owner maps in which every VoLTE user
/// collects 300 bits in at least one TTI. `bits` has one matrix per TTI or
/// a single one for the whole frame. `None` when no map qualifies.
pub fn frame_optimum(bits: &[BitsMatrix], num_volte: usize, num_tti: usize) -> Option<u64> {
    let n_prb = bits[0].num_prb();
    let n_users = bits[0].num_users();
    let mut best = None;
    for_each_owner_map(n_prb * num_tti, &choices(n_users, n_users - num_volte), |owner| {
        let mut per = vec![0u64; n_users * num_tti];
        for t in 0..num_tti {
            let b = &bits[t % bits.len()];
            for n in 0..n_prb {
                if let Some(u) = owner[t * n_prb + n] {
                    per[t * n_users + u] += b.get(n, u) as u64;
                }
            }
        }
        let served = (0..num_volte).all(|u| (0..num_tti).any(|t| per[t * n_users + u] >= PACKET));
        if served {
            let data: u64 = (0..num_tti)
                .flat_map(|t| (num_volte..n_users).map(move |u| (t, u)))
                .map(|(t, u)| per[t * n_users + u])
                .sum();
            best = best.max(Some(data));
        }
    });
    best
}

/// Most VoLTE users from `remaining` that can be served in one TTI.
pub fn tti_max_served(bits: &BitsMatrix, remaining: &[usize]) -> usize {
    let mut c: Vec<Option<usize>> = remaining.iter().copied().map(Some).collect();
    c.insert(0, None);
    let mut best = 0;
    for_each_owner_map(bits.num_prb(), &c, |owner| {
        let count = remaining
            .iter()
            .filter(|&&u| {
                let got: u64 = (0..bits.num_prb()).filter(|&n| owner[n] == Some(u)).map(|n| bits.get(n, u) as u64).sum();
                got >= PACKET
            })
            .count();
        best = best.max(count);
    });
    best
}

/// Best weighted data bits in one TTI when exactly the users with `y` set
/// must get a packet. `None` when they cannot all be served.
pub fn tti_best_weighted(bits: &BitsMatrix, y: &[bool], weights: &[f64]) -> Option<f64> {
    let num_volte = y.len();
    let n_users = bits.num_users();
    let mut best: Option<f64> = None;
    for_each_owner_map(bits.num_prb(), &choices(n_users, n_users - num_volte), |owner| {
        let mut per = vec![0u64; n_users];
        for (n, o) in owner.iter().enumerate() {
            if let Some(u) = *o {
                per[u] += bits.get(n, u) as u64;
            }
        }
        if (0..num_volte).all(|u| !y[u] || per[u] >= PACKET) {
            let v: f64 = (num_volte..n_users).map(|u| per[u] as f64 * weights[u - num_volte]).sum();
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
    });
    best
}
