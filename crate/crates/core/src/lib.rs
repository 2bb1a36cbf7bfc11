//! Downlink LTE scheduling for VoLTE (guaranteed-bit-rate) and best-effort
//! data users.
//!
//! The crate is `no_std` with `alloc`. It contains:
//!
//! * [`ratemap`]: the CQI/MCS table and bits-per-PRB arithmetic,
//! * [`channel`]: user drops, ETU fading, interference and bits matrices,
//! * [`bip`]: an exact 0/1 linear-program solver (simplex relaxation,
//!   branch-and-bound, exhaustive enumeration),
//! * [`sched`]: frame-level and TTI-level optimal schedulers, the greedy
//!   heuristics and the strict-priority baseline,
//! * [`metrics`]: throughput, Jain's index, outage and run aggregation.
//!
//! IO, configuration and the experiment driver live in `volte-sim`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bip;
pub mod channel;
pub mod metrics;
pub mod ratemap;
pub mod sched;

use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidCqi(u8),
    NonFiniteSinr,
    InvalidProfile,
    InvalidParameter(&'static str),
    DimensionMismatch,
    /// Exhaustive enumeration was asked to handle too many variables.
    TooManyVariables { num_vars: usize, limit: usize },
    EmptyInput,
    /// A phase-2 program turned out infeasible for a phase-1 certified
    /// VoLTE selection.
    PhaseContract,
    /// The simplex method hit its pivot limit.
    IterationLimit,
    /// The solver budget ran out before any feasible point was found.
    BudgetExhausted,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCqi(v) => write!(f, "CQI {v} outside 0..=15"),
            Error::NonFiniteSinr => f.write_str("SINR must be finite"),
            Error::InvalidProfile => {
                f.write_str("power-delay profile needs taps with strictly increasing delays from 0")
            }
            Error::InvalidParameter(what) => f.write_str(what),
            Error::DimensionMismatch => f.write_str("matrix dimensions do not match"),
            Error::TooManyVariables { num_vars, limit } => {
                write!(f, "{num_vars} variables exceed the enumeration limit of {limit}")
            }
            Error::EmptyInput => f.write_str("input must not be empty"),
            Error::PhaseContract => {
                f.write_str("phase-2 allocation infeasible for a phase-1 VoLTE selection")
            }
            Error::IterationLimit => f.write_str("simplex iteration limit reached"),
            Error::BudgetExhausted => f.write_str("solver budget exhausted without a feasible point"),
        }
    }
}

impl core::error::Error for Error {}
