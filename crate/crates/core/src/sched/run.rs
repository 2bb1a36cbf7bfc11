//! One frame of scheduling under a given policy.

use alloc::vec;
use alloc::vec::Vec;

use super::frame::schedule_frame_optimal;
use super::heuristic::{heuristic_tti, HeuristicMode};
use super::tti::{tti_allocate, tti_select_volte};
use super::{FrameAllocation, FrameStatus, Policy, SchedulerState, DEFAULT_GAMMA, FRAME_TTIS};
use crate::bip::{Budget, NodeLimit, SolveStatus, Unlimited};
use crate::channel::BitsMatrix;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOptions {
    pub num_tti: usize,
    pub gamma: f64,
    /// Run the heuristics exactly as in the original pseudocode.
    pub strict_pseudocode: bool,
    /// Branch-and-bound node budget per solve; `None` solves to optimality.
    pub node_limit: Option<u64>,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions {
            num_tti: FRAME_TTIS,
            gamma: DEFAULT_GAMMA,
            strict_pseudocode: false,
            node_limit: None,
        }
    }
}

impl FrameOptions {
    fn budget(&self) -> alloc::boxed::Box<dyn Budget> {
        match self.node_limit {
            Some(n) => alloc::boxed::Box::new(NodeLimit(n)),
            None => alloc::boxed::Box::new(Unlimited),
        }
    }
}

/// Schedules one frame. `bits` holds one matrix for the whole frame or one
/// per TTI. `pf_averages` carries `A_k` over from the previous frame (all
/// ones when `None`). Returns the allocation and the end-of-frame state.
///
/// Frame-level infeasibility is not an error: the frame comes back empty
/// with [`FrameStatus::Infeasible`].
pub fn run_frame(
    bits: &[BitsMatrix],
    num_volte: usize,
    num_data: usize,
    policy: Policy,
    opts: &FrameOptions,
    pf_averages: Option<Vec<f64>>,
) -> Result<(FrameAllocation, SchedulerState), Error> {
    let first = bits.first().ok_or(Error::EmptyInput)?;
    if first.num_users() != num_volte + num_data || (bits.len() != 1 && bits.len() != opts.num_tti) {
        return Err(Error::DimensionMismatch);
    }
    let mut state = SchedulerState::new(num_volte, num_data, opts.gamma)?;
    if let Some(a) = pf_averages {
        state = state.with_pf_averages(a)?;
    }
    let n_prb = first.num_prb();
    let tti_bits = |t: usize| &bits[t % bits.len()];

    let (status, per_tti) = match policy {
        Policy::FrameOptimal => {
            let sol = schedule_frame_optimal(bits, num_volte, opts.num_tti, opts.budget().as_mut())?;
            state.solver_nodes += sol.nodes;
            if sol.status == SolveStatus::Timeout {
                state.solver_timeouts += 1;
            }
            let frame = match sol.allocation {
                Some(a) => a,
                None => {
                    let status = match sol.status {
                        SolveStatus::Infeasible => FrameStatus::Infeasible,
                        _ => FrameStatus::Timeout,
                    };
                    FrameAllocation::empty(status, opts.num_tti, n_prb, num_volte, num_data)
                }
            };
            for a in &frame.per_tti {
                state.record_tti(a);
            }
            return Ok((frame, state));
        }
        Policy::TtiOptimal | Policy::TtiOptimalPf => {
            let mut per_tti = Vec::with_capacity(opts.num_tti);
            for t in 0..opts.num_tti {
                let b = tti_bits(t);
                let sel = tti_select_volte(b, &state.remaining_volte, num_volte, opts.budget().as_mut())?;
                let weights = if policy == Policy::TtiOptimalPf {
                    state.pf_weights()
                } else {
                    vec![1.0; num_data]
                };
                let (a, stats) = tti_allocate(b, &sel.y, &weights, opts.budget().as_mut(), Some(&sel.hint))?;
                for s in [sel.stats, stats] {
                    state.solver_nodes += s.nodes;
                    state.solver_timeouts += u64::from(s.status == SolveStatus::Timeout);
                }
                state.record_tti(&a);
                per_tti.push(a);
            }
            (FrameStatus::Scheduled, per_tti)
        }
        Policy::Heuristic | Policy::HeuristicPf | Policy::Baseline => {
            let mode = match policy {
                Policy::Heuristic => HeuristicMode::MaxThroughput,
                Policy::HeuristicPf => HeuristicMode::ProportionalFair,
                _ => HeuristicMode::Baseline,
            };
            let mut per_tti = Vec::with_capacity(opts.num_tti);
            for t in 0..opts.num_tti {
                let mut ops = 0;
                let a = heuristic_tti(tti_bits(t), &state, mode, opts.strict_pseudocode, &mut ops);
                state.ops += ops;
                state.record_tti(&a);
                per_tti.push(a);
            }
            (FrameStatus::Scheduled, per_tti)
        }
    };
    Ok((FrameAllocation::new(status, per_tti, bits, num_volte), state))
}
