//! Throughput, fairness and outage statistics.

use alloc::vec::Vec;

use crate::sched::{FrameAllocation, FrameStatus};
use crate::Error;

/// Jain's index `(Σx)² / (K·Σx²)`; 1 when every rate is zero.
pub fn jain_index(rates: &[f64]) -> Result<f64, Error> {
    if rates.is_empty() {
        return Err(Error::EmptyInput);
    }
    if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidParameter("rates must be finite and nonnegative"));
    }
    let sum: f64 = rates.iter().sum();
    let sq: f64 = rates.iter().map(|r| r * r).sum();
    if sq == 0.0 {
        return Ok(1.0);
    }
    Ok(sum * sum / (rates.len() as f64 * sq))
}

/// Mean over frames of the fraction of the `num_volte` users left unserved.
pub fn outage_probability(frames: &[FrameAllocation], num_volte: usize) -> Result<f64, Error> {
    if num_volte == 0 {
        return Err(Error::InvalidParameter("outage needs at least one VoLTE user"));
    }
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    let u = num_volte as f64;
    let total: f64 = frames
        .iter()
        .map(|f| (u - f.volte_served_count().min(num_volte) as f64) / u)
        .sum();
    Ok(total / frames.len() as f64)
}

/// Summary of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Mean VoLTE payload bits per frame (253 per served packet).
    pub volte_bits_per_frame: f64,
    pub data_bits_per_frame: f64,
    pub total_bits_per_frame: f64,
    /// Over the whole-run totals of the data users; `None` without data users.
    pub jain: Option<f64>,
    /// `None` without VoLTE users.
    pub outage: Option<f64>,
    /// Fraction of frames whose frame-level program was infeasible.
    pub infeasible_fraction: f64,
}

impl RunMetrics {
    /// Frames without an allocation count as zero throughput.
    pub fn from_frames(frames: &[FrameAllocation], num_volte: usize) -> Result<Self, Error> {
        let first = frames.first().ok_or(Error::EmptyInput)?;
        let num_users = first.user_bits.len();
        if num_users < num_volte || frames.iter().any(|f| f.user_bits.len() != num_users) {
            return Err(Error::DimensionMismatch);
        }
        let nf = frames.len() as f64;
        let volte = frames.iter().map(|f| f.volte_payload_bits()).sum::<u64>() as f64 / nf;
        let data = frames.iter().map(|f| f.data_bits()).sum::<u64>() as f64 / nf;
        let mut totals = alloc::vec![0.0; num_users - num_volte];
        for f in frames {
            for (t, b) in totals.iter_mut().zip(f.data_user_bits(num_volte)) {
                *t += *b as f64;
            }
        }
        let jain = if totals.is_empty() {
            None
        } else {
            Some(jain_index(&totals)?)
        };
        let outage = if num_volte == 0 {
            None
        } else {
            Some(outage_probability(frames, num_volte)?)
        };
        let infeasible = frames.iter().filter(|f| f.status == FrameStatus::Infeasible).count();
        Ok(RunMetrics {
            volte_bits_per_frame: volte,
            data_bits_per_frame: data,
            total_bits_per_frame: volte + data,
            jain,
            outage,
            infeasible_fraction: infeasible as f64 / nf,
        })
    }
}

/// Mean and sample standard deviation (0 for a single value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
        };
        Some(Stat {
            mean,
            std,
            count: values.len(),
        })
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / libm::sqrt(self.count as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    pub runs: usize,
    pub volte_bits_per_frame: Stat,
    pub data_bits_per_frame: Stat,
    pub total_bits_per_frame: Stat,
    /// Over the runs that define the value.
    pub jain: Option<Stat>,
    pub outage: Option<Stat>,
    pub infeasible_fraction: Stat,
}

pub fn aggregate_runs(runs: &[RunMetrics]) -> Result<AggregateMetrics, Error> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let field = |f: fn(&RunMetrics) -> f64| {
        let v: Vec<f64> = runs.iter().map(f).collect();
        Stat::of(&v).expect("nonempty")
    };
    let opt_field = |f: fn(&RunMetrics) -> Option<f64>| {
        let v: Vec<f64> = runs.iter().filter_map(f).collect();
        Stat::of(&v)
    };
    Ok(AggregateMetrics {
        runs: runs.len(),
        volte_bits_per_frame: field(|r| r.volte_bits_per_frame),
        data_bits_per_frame: field(|r| r.data_bits_per_frame),
        total_bits_per_frame: field(|r| r.total_bits_per_frame),
        jain: opt_field(|r| r.jain),
        outage: opt_field(|r| r.outage),
        infeasible_fraction: field(|r| r.infeasible_fraction),
    })
}

/// Bits per 20 ms frame to kbit/s.
pub fn frame_bits_to_kbps(bits: f64) -> f64 {
    bits * 0.05
}
