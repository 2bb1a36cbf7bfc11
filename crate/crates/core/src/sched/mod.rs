//! Schedulers for one cell: frame-level and TTI-level optimal programs, the
//! greedy heuristics and the strict-priority baseline.
//!
//! Users are indexed as in [`BitsMatrix`]: VoLTE users `0..U`, then data
//! users `U..U+K`. Data user `k` lives in column `U + k`.

mod frame;
mod heuristic;
mod run;
mod tti;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::BitsMatrix;
use crate::ratemap::{VOLTE_PACKET_BITS, VOLTE_PAYLOAD_BITS};
use crate::Error;

pub use frame::{
    build_frame_program, frame_program_vars, schedule_frame_optimal, schedule_frame_relaxed_bound,
    FrameSolution,
};
pub use heuristic::{heuristic_tti, HeuristicMode};
pub use run::{run_frame, FrameOptions};
pub use tti::{
    build_allocation_program, build_selection_program, tti_allocate, tti_program_vars,
    tti_select_volte, TtiSolveStats, VolteSelection,
};

/// TTIs per frame.
pub const FRAME_TTIS: usize = 20;
pub const DEFAULT_GAMMA: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    FrameOptimal,
    TtiOptimal,
    TtiOptimalPf,
    Heuristic,
    HeuristicPf,
    Baseline,
}

impl Policy {
    pub const ALL: [Policy; 6] = [
        Policy::FrameOptimal,
        Policy::TtiOptimal,
        Policy::TtiOptimalPf,
        Policy::Heuristic,
        Policy::HeuristicPf,
        Policy::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::FrameOptimal => "frame_optimal",
            Policy::TtiOptimal => "tti_optimal",
            Policy::TtiOptimalPf => "tti_optimal_pf",
            Policy::Heuristic => "heuristic",
            Policy::HeuristicPf => "heuristic_pf",
            Policy::Baseline => "baseline",
        }
    }

    /// Policies that call the branch-and-bound solver.
    pub fn is_optimal(self) -> bool {
        matches!(self, Policy::FrameOptimal | Policy::TtiOptimal | Policy::TtiOptimalPf)
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or(Error::InvalidParameter("unknown policy"))
    }
}

/// One TTI's assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TtiAllocation {
    /// Owner of each PRB, `None` when unused. One owner per PRB makes PRB
    /// exclusivity structural.
    pub owner: Vec<Option<usize>>,
    /// `y[u]`: VoLTE user `u` had its packet sent in this TTI.
    pub y: Vec<bool>,
    /// Bits delivered to each data user.
    pub data_bits_per_user: Vec<u64>,
    /// VoLTE users served, ascending.
    pub volte_served: Vec<usize>,
}

impl TtiAllocation {
    /// Every PRB unused.
    pub fn empty(num_prb: usize, num_volte: usize, num_data: usize) -> Self {
        TtiAllocation {
            owner: vec![None; num_prb],
            y: vec![false; num_volte],
            data_bits_per_user: vec![0; num_data],
            volte_served: Vec::new(),
        }
    }

    /// Builds the record from PRB owners. A VoLTE user counts as served when
    /// it owns at least one PRB and its PRBs carry a full packet; VoLTE PRBs
    /// that fall short are released.
    pub fn from_owners(bits: &BitsMatrix, num_volte: usize, mut owner: Vec<Option<usize>>) -> Self {
        let num_data = bits.num_users() - num_volte;
        let mut volte_bits = vec![0u64; num_volte];
        for (n, o) in owner.iter().enumerate() {
            if let Some(u) = *o {
                if u < num_volte {
                    volte_bits[u] += bits.get(n, u) as u64;
                }
            }
        }
        let y: Vec<bool> = volte_bits
            .iter()
            .map(|&b| b >= VOLTE_PACKET_BITS as u64)
            .collect();
        let mut data_bits_per_user = vec![0u64; num_data];
        for (n, o) in owner.iter_mut().enumerate() {
            match *o {
                Some(u) if u < num_volte && !y[u] => *o = None,
                Some(u) if u >= num_volte => data_bits_per_user[u - num_volte] += bits.get(n, u) as u64,
                _ => {}
            }
        }
        let volte_served = (0..num_volte).filter(|&u| y[u]).collect();
        TtiAllocation {
            owner,
            y,
            data_bits_per_user,
            volte_served,
        }
    }

    pub fn num_prb(&self) -> usize {
        self.owner.len()
    }

    /// `x[n][u]` of the assignment matrix.
    pub fn x(&self, prb: usize, user: usize) -> bool {
        self.owner[prb] == Some(user)
    }

    pub fn data_bits(&self) -> u64 {
        self.data_bits_per_user.iter().sum()
    }

    /// Bits carried to one user in this TTI.
    pub fn user_bits(&self, bits: &BitsMatrix, user: usize) -> u64 {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Some(user))
            .map(|(n, _)| bits.get(n, user) as u64)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameStatus {
    Scheduled,
    /// The frame-level program has no solution; nothing is allocated.
    Infeasible,
    /// The solver budget ran out. The allocation is the best one found, or
    /// empty if none was.
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAllocation {
    pub status: FrameStatus,
    pub per_tti: Vec<TtiAllocation>,
    /// Frame totals per user over all `U + K` users.
    pub user_bits: Vec<u64>,
}

impl FrameAllocation {
    /// Assembles a frame and its per-user totals.
    pub fn new(
        status: FrameStatus,
        per_tti: Vec<TtiAllocation>,
        bits: &[BitsMatrix],
        num_volte: usize,
    ) -> Self {
        let num_users = bits.first().map_or(num_volte, BitsMatrix::num_users);
        let mut user_bits = vec![0u64; num_users];
        for (t, a) in per_tti.iter().enumerate() {
            let b = &bits[t % bits.len()];
            for (n, o) in a.owner.iter().enumerate() {
                if let Some(u) = *o {
                    user_bits[u] += b.get(n, u) as u64;
                }
            }
        }
        FrameAllocation {
            status,
            per_tti,
            user_bits,
        }
    }

    pub fn empty(status: FrameStatus, num_tti: usize, num_prb: usize, num_volte: usize, num_data: usize) -> Self {
        FrameAllocation {
            status,
            per_tti: vec![TtiAllocation::empty(num_prb, num_volte, num_data); num_tti],
            user_bits: vec![0; num_volte + num_data],
        }
    }

    pub fn volte_served_count(&self) -> usize {
        self.per_tti.iter().map(|a| a.volte_served.len()).sum()
    }

    pub fn data_bits(&self) -> u64 {
        self.per_tti.iter().map(TtiAllocation::data_bits).sum()
    }

    /// `C_volte` for the frame: payload bits of every served packet.
    pub fn volte_payload_bits(&self) -> u64 {
        self.volte_served_count() as u64 * VOLTE_PAYLOAD_BITS as u64
    }

    /// Frame totals of the data users only.
    pub fn data_user_bits(&self, num_volte: usize) -> &[u64] {
        &self.user_bits[num_volte..]
    }
}

/// Per-frame bookkeeping shared by all policies.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState {
    pub num_volte: usize,
    pub num_data: usize,
    /// VoLTE users still waiting this frame, ascending.
    pub remaining_volte: Vec<usize>,
    /// Payload bits of VoLTE packets sent this frame.
    pub c_volte: u64,
    /// Data bits sent this frame.
    pub c_data: u64,
    /// Smoothed data rates `A_k`, kept strictly positive.
    pub pf_avg: Vec<f64>,
    pub gamma: f64,
    /// `C_k` of the last TTI.
    pub last_data_rates: Vec<u64>,
    /// Heuristic operation count this frame.
    pub ops: u64,
    /// Branch-and-bound nodes this frame.
    pub solver_nodes: u64,
    /// Solves this frame that ran out of budget.
    pub solver_timeouts: u64,
}

impl SchedulerState {
    pub fn new(num_volte: usize, num_data: usize, gamma: f64) -> Result<Self, Error> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter("gamma must lie in (0, 1)"));
        }
        Ok(SchedulerState {
            num_volte,
            num_data,
            remaining_volte: (0..num_volte).collect(),
            c_volte: 0,
            c_data: 0,
            pf_avg: vec![1.0; num_data],
            gamma,
            last_data_rates: vec![0; num_data],
            ops: 0,
            solver_nodes: 0,
            solver_timeouts: 0,
        })
    }

    /// Replaces the PF averages, e.g. with those of the previous frame.
    pub fn with_pf_averages(mut self, pf_avg: Vec<f64>) -> Result<Self, Error> {
        if pf_avg.len() != self.num_data {
            return Err(Error::DimensionMismatch);
        }
        if !pf_avg.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter("PF averages must be positive"));
        }
        self.pf_avg = pf_avg;
        Ok(self)
    }

    /// Resets the per-frame fields. PF averages carry over.
    pub fn start_frame(&mut self) {
        self.remaining_volte = (0..self.num_volte).collect();
        self.c_volte = 0;
        self.c_data = 0;
        self.last_data_rates.iter_mut().for_each(|c| *c = 0);
        self.ops = 0;
        self.solver_nodes = 0;
        self.solver_timeouts = 0;
    }

    /// End-of-TTI update: drops served VoLTE users, bumps the accumulators
    /// and smooths the PF averages.
    pub fn record_tti(&mut self, alloc: &TtiAllocation) {
        self.remaining_volte.retain(|u| !alloc.y[*u]);
        self.c_volte += alloc.volte_served.len() as u64 * VOLTE_PAYLOAD_BITS as u64;
        self.c_data += alloc.data_bits();
        for (k, &c) in alloc.data_bits_per_user.iter().enumerate() {
            let a = self.gamma * self.pf_avg[k] + (1.0 - self.gamma) * c as f64;
            self.pf_avg[k] = a.max(f64::MIN_POSITIVE);
            self.last_data_rates[k] = c;
        }
    }

    /// PF weights `1 / A_k`.
    pub fn pf_weights(&self) -> Vec<f64> {
        self.pf_avg.iter().map(|a| 1.0 / a).collect()
    }
}

/// Best data user on a PRB under weights, lowest index on ties. Returns the
/// column index `U + k`.
pub(crate) fn best_data_user(bits: &BitsMatrix, num_volte: usize, prb: usize, weights: Option<&[f64]>) -> Option<usize> {
    let row = &bits.prb_row(prb)[num_volte..];
    let mut best: Option<(usize, f64)> = None;
    for (k, &b) in row.iter().enumerate() {
        let score = match weights {
            Some(w) => b as f64 * w[k],
            None => b as f64,
        };
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((k, score));
        }
    }
    best.map(|(k, _)| num_volte + k)
}

/// Fewest PRBs whose bits for `user` add up to a packet, or `None` if the
/// whole band falls short.
pub(crate) fn min_prbs_for_packet(bits: &BitsMatrix, user: usize) -> Option<usize> {
    let mut col: Vec<u32> = (0..bits.num_prb()).map(|n| bits.get(n, user)).collect();
    col.sort_unstable_by(|a, b| b.cmp(a));
    let mut total = 0u64;
    for (i, b) in col.into_iter().enumerate() {
        total += b as u64;
        if total >= VOLTE_PACKET_BITS as u64 {
            return Some(i + 1);
        }
    }
    None
}

pub(crate) fn check_dims(bits: &BitsMatrix, num_volte: usize) -> Result<usize, Error> {
    bits.num_users()
        .checked_sub(num_volte)
        .ok_or(Error::DimensionMismatch)
}
