//! Exact solver for small 0/1 linear programs.
//!
//! Programs maximise a linear objective over binary variables subject to
//! equality (`a·x = b`) and at-least (`a·x ≥ b`) rows; an at-most row is
//! written as an at-least row with negated coefficients. Three solvers are
//! provided:
//!
//! * [`solve_lp_relaxation`]: dense bounded-variable simplex over `[0,1]^n`,
//! * [`solve_branch_and_bound`]: depth-first branch-and-bound on top of it,
//! * [`solve_exhaustive`]: Gray-code enumeration, used as a test oracle.

mod bnb;
mod exhaustive;
mod simplex;

use alloc::vec::Vec;
use core::fmt;

pub use bnb::{solve_branch_and_bound, solve_branch_and_bound_from, Budget, NodeLimit, Unlimited};
pub use exhaustive::{solve_exhaustive, MAX_EXHAUSTIVE_VARS};
pub use simplex::{solve_lp_relaxation, LpOutcome, LpStatus};

/// Rows are checked against this tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// LP values within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Sparse linear row `Σ coeff·x  (= or ≥)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    /// Terms may come in any order; repeated indices are summed and zero
    /// coefficients dropped.
    pub fn new(mut terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        Row { terms: merged, rhs }
    }

    pub fn dense(coeffs: &[f64], rhs: f64) -> Self {
        Row::new(coeffs.iter().copied().enumerate().collect(), rhs)
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn activity(&self, x: &[bool]) -> f64 {
        self.terms.iter().filter(|t| x[t.0]).map(|t| t.1).sum()
    }

    pub fn activity_frac(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.1 * x[t.0]).sum()
    }

    fn max_index(&self) -> Option<usize> {
        self.terms.last().map(|t| t.0)
    }
}

/// Semantic tag of a scheduling variable, used for decoding and dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarLabel {
    /// PRB `prb` of TTI `tti` assigned to `user`.
    Assign { prb: usize, user: usize, tti: usize },
    /// VoLTE `user` served in TTI `tti`.
    Serve { user: usize, tti: usize },
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarLabel::Assign { prb, user, tti } => write!(f, "X[{prb}][{user}][{tti}]"),
            VarLabel::Serve { user, tti } => write!(f, "Y[{user}][{tti}]"),
        }
    }
}

/// A maximisation problem over `num_vars` binary variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_rows: Vec<Row>,
    pub ge_rows: Vec<Row>,
    /// Empty, or one label per variable.
    pub labels: Vec<VarLabel>,
}

impl BinaryProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        BinaryProgram {
            num_vars: objective.len(),
            objective,
            ..Default::default()
        }
    }

    pub fn add_eq(&mut self, row: Row) {
        self.eq_rows.push(row);
    }

    pub fn add_ge(&mut self, row: Row) {
        self.ge_rows.push(row);
    }

    /// Adds `a·x ≤ b` as `-a·x ≥ -b`.
    pub fn add_le(&mut self, row: Row) {
        let terms = row.terms.into_iter().map(|(j, c)| (j, -c)).collect();
        self.ge_rows.push(Row::new(terms, -row.rhs));
    }

    /// Checks vector lengths and row indices.
    pub fn validate(&self) -> Result<(), crate::Error> {
        let in_range = |r: &Row| r.max_index().is_none_or(|m| m < self.num_vars);
        let ok = self.objective.len() == self.num_vars
            && (self.labels.is_empty() || self.labels.len() == self.num_vars)
            && self.eq_rows.iter().all(in_range)
            && self.ge_rows.iter().all(in_range)
            && self.objective.iter().all(|c| c.is_finite());
        if ok {
            Ok(())
        } else {
            Err(crate::Error::DimensionMismatch)
        }
    }

    pub fn objective_value(&self, x: &[bool]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .map(|(c, _)| *c)
            .sum()
    }

    /// True when every row holds within [`FEASIBILITY_TOL`].
    pub fn is_feasible(&self, x: &[bool]) -> bool {
        x.len() == self.num_vars
            && self
                .eq_rows
                .iter()
                .all(|r| (r.activity(x) - r.rhs).abs() <= FEASIBILITY_TOL)
            && self
                .ge_rows
                .iter()
                .all(|r| r.activity(x) >= r.rhs - FEASIBILITY_TOL)
    }

    /// Fractional counterpart of [`is_feasible`](Self::is_feasible), with
    /// box bounds.
    pub fn is_feasible_frac(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && self
                .eq_rows
                .iter()
                .all(|r| (r.activity_frac(x) - r.rhs).abs() <= tol)
            && self.ge_rows.iter().all(|r| r.activity_frac(x) >= r.rhs - tol)
    }

    /// True when every objective coefficient is an integer, so any 0/1
    /// objective value is integral too.
    pub fn has_integral_objective(&self) -> bool {
        self.objective
            .iter()
            .all(|c| (c - libm::round(*c)).abs() <= 1e-12 && c.abs() < 1e15)
    }
}

/// Plain-text dump: a `max` line, then one line per row as
/// `<sense> <dense coefficients...> <rhs>`, with `sense` one of `=` / `>=`.
impl fmt::Display for BinaryProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.num_vars)?;
        write!(f, "max")?;
        for c in &self.objective {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        let mut dense = alloc::vec![0.0; self.num_vars];
        for (sense, rows) in [("=", &self.eq_rows), (">=", &self.ge_rows)] {
            for r in rows {
                dense.iter_mut().for_each(|v| *v = 0.0);
                for &(j, c) in r.terms() {
                    dense[j] = c;
                }
                write!(f, "{sense}")?;
                for c in &dense {
                    write!(f, " {c}")?;
                }
                writeln!(f, " {}", r.rhs)?;
            }
        }
        if !self.labels.is_empty() {
            write!(f, "labels")?;
            for l in &self.labels {
                write!(f, " {l}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// Budget ran out; the outcome carries the incumbent (if any) and the
    /// best proven bound.
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Optimal assignment, or the incumbent on timeout.
    pub assignment: Option<Vec<bool>>,
    /// Objective of `assignment`; `-inf` when there is none.
    pub objective_value: f64,
    /// LP relaxation objective at the root; `-inf` if the LP is infeasible.
    pub relaxation_bound: f64,
    /// Proven upper bound on the optimum. Equals `objective_value` when
    /// optimal.
    pub best_bound: f64,
    /// Branch-and-bound nodes whose LP was solved.
    pub nodes: u64,
}

impl SolveOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub(crate) fn infeasible(relaxation_bound: f64, nodes: u64) -> Self {
        SolveOutcome {
            status: SolveStatus::Infeasible,
            assignment: None,
            objective_value: f64::NEG_INFINITY,
            relaxation_bound,
            best_bound: f64::NEG_INFINITY,
            nodes,
        }
    }
}
