//! Dense two-phase primal simplex with variable upper bounds.
//!
//! Structural variables live in `[0, 1]`; surplus and artificial columns
//! are unbounded above. Nonbasic variables sit at either bound, so the box
//! needs no explicit rows. Pricing is Dantzig's largest reduced cost; after
//! a run of degenerate pivots the solver switches to Bland's rule until the
//! objective moves again, which rules out cycling.

use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryProgram, FEASIBILITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;
const DEGENERATE_RUN: u32 = 40;
const PHASE_ONE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Numerical trouble: the pivot budget ran out.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// One value per program variable, in `[0, 1]` (empty unless optimal).
    pub values: Vec<f64>,
    pub objective: f64,
    /// Reduced cost of each variable at the optimum; zero for basic and
    /// fixed variables (empty unless optimal).
    pub reduced_costs: Vec<f64>,
}

impl LpOutcome {
    fn infeasible() -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::NEG_INFINITY,
            reduced_costs: Vec::new(),
        }
    }
}

/// Optimal LP over `[0,1]^n` with the program's rows.
pub fn solve_lp_relaxation(p: &BinaryProgram) -> LpOutcome {
    solve_with_fixings(p, &vec![None; p.num_vars])
}

/// Same, with some variables pinned to 0 or 1.
pub(crate) fn solve_with_fixings(p: &BinaryProgram, fixed: &[Option<bool>]) -> LpOutcome {
    let mut col_of = vec![usize::MAX; p.num_vars];
    let mut free = Vec::new();
    let mut offset = 0.0;
    for j in 0..p.num_vars {
        match fixed[j] {
            None => {
                col_of[j] = free.len();
                free.push(j);
            }
            Some(true) => offset += p.objective[j],
            Some(false) => {}
        }
    }

    // Substitute fixed variables and drop rows that no longer have free
    // terms (after checking them).
    let mut rows: Vec<(Vec<(usize, f64)>, f64, bool)> = Vec::new();
    for (is_eq, r) in p
        .eq_rows
        .iter()
        .map(|r| (true, r))
        .chain(p.ge_rows.iter().map(|r| (false, r)))
    {
        let mut rhs = r.rhs;
        let mut terms = Vec::new();
        for &(j, c) in r.terms() {
            match fixed[j] {
                None => terms.push((col_of[j], c)),
                Some(true) => rhs -= c,
                Some(false) => {}
            }
        }
        if terms.is_empty() {
            let ok = if is_eq {
                rhs.abs() <= FEASIBILITY_TOL
            } else {
                rhs <= FEASIBILITY_TOL
            };
            if !ok {
                return LpOutcome::infeasible();
            }
        } else {
            rows.push((terms, rhs, is_eq));
        }
    }

    let cost: Vec<f64> = free.iter().map(|&j| p.objective[j]).collect();
    let mut tab = Tableau::new(free.len(), &rows);
    let status = tab.solve(&cost);
    if status != LpStatus::Optimal {
        return LpOutcome {
            status,
            values: Vec::new(),
            objective: f64::NEG_INFINITY,
            reduced_costs: Vec::new(),
        };
    }
    let col_values = tab.structural_values();
    let mut values = vec![0.0; p.num_vars];
    let mut reduced_costs = vec![0.0; p.num_vars];
    for j in 0..p.num_vars {
        values[j] = match fixed[j] {
            None => col_values[col_of[j]].clamp(0.0, 1.0),
            Some(true) => 1.0,
            Some(false) => 0.0,
        };
        if fixed[j].is_none() && !tab.basic[col_of[j]] {
            reduced_costs[j] = tab.d[col_of[j]];
        }
    }
    let objective = offset
        + free
            .iter()
            .zip(&col_values)
            .map(|(&j, v)| p.objective[j] * v)
            .sum::<f64>();
    LpOutcome {
        status: LpStatus::Optimal,
        values,
        objective,
        reduced_costs,
    }
}

struct Tableau {
    m: usize,
    width: usize,
    n_struct: usize,
    /// First artificial column; columns from here on are artificial.
    art_start: usize,
    a: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    basic: Vec<bool>,
    d: Vec<f64>,
    phase_two: bool,
}

impl Tableau {
    fn new(n_struct: usize, rows: &[(Vec<(usize, f64)>, f64, bool)]) -> Self {
        let m = rows.len();
        let n_surplus = rows.iter().filter(|r| !r.2).count();
        // A surplus column can start basic when its row reads `-a·x + s = -b`
        // with `-b >= 0`; every other row gets an artificial.
        let n_art = rows.iter().filter(|r| r.2 || r.1 > 0.0).count();
        let art_start = n_struct + n_surplus;
        let width = art_start + n_art;
        let mut a = vec![0.0; m * width];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut basic = vec![false; width];
        let mut upper = vec![f64::INFINITY; width];
        upper[..n_struct].iter_mut().for_each(|u| *u = 1.0);

        let mut next_surplus = n_struct;
        let mut next_art = art_start;
        for (i, (terms, rhs, is_eq)) in rows.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            let surplus = if *is_eq {
                None
            } else {
                next_surplus += 1;
                Some(next_surplus - 1)
            };
            let flip = if *is_eq { *rhs < 0.0 } else { *rhs <= 0.0 };
            let sign = if flip { -1.0 } else { 1.0 };
            for &(j, c) in terms {
                row[j] = sign * c;
            }
            if let Some(s) = surplus {
                row[s] = -sign;
            }
            beta[i] = sign * rhs;
            let b = match surplus {
                Some(s) if flip => s,
                _ => {
                    next_art += 1;
                    row[next_art - 1] = 1.0;
                    next_art - 1
                }
            };
            basis[i] = b;
            basic[b] = true;
        }
        Tableau {
            m,
            width,
            n_struct,
            art_start,
            a,
            beta,
            basis,
            upper,
            at_upper: vec![false; width],
            basic,
            d: vec![0.0; width],
            phase_two: false,
        }
    }

    fn solve(&mut self, cost: &[f64]) -> LpStatus {
        let limit = 20_000 + 50 * (self.m + self.width) as u64;
        if self.art_start < self.width {
            let mut c1 = vec![0.0; self.width];
            c1[self.art_start..].iter_mut().for_each(|c| *c = -1.0);
            self.price(&c1);
            if !self.iterate(limit) {
                return LpStatus::IterationLimit;
            }
            let infeasibility: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.art_start)
                .map(|i| self.beta[i])
                .sum();
            if infeasibility > PHASE_ONE_TOL * (1 + self.m) as f64 {
                return LpStatus::Infeasible;
            }
        }
        // Artificials are pinned at zero from here on; basic ones on
        // redundant rows stay basic at zero.
        for j in self.art_start..self.width {
            self.upper[j] = 0.0;
        }
        self.phase_two = true;
        let mut c2 = vec![0.0; self.width];
        c2[..self.n_struct].copy_from_slice(cost);
        self.price(&c2);
        if self.iterate(limit) {
            LpStatus::Optimal
        } else {
            LpStatus::IterationLimit
        }
    }

    /// Reduced costs `c_j - c_B · B⁻¹a_j` from scratch.
    fn price(&mut self, c: &[f64]) {
        self.d.copy_from_slice(c);
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.width..(i + 1) * self.width];
                for (d, &v) in self.d.iter_mut().zip(row) {
                    *d -= cb * v;
                }
            }
        }
        for i in 0..self.m {
            self.d[self.basis[i]] = 0.0;
        }
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.width {
            if self.basic[j] || self.upper[j] <= 0.0 || (self.phase_two && j >= self.art_start) {
                continue;
            }
            let dj = self.d[j];
            let dir = if !self.at_upper[j] && dj > COST_TOL {
                1.0
            } else if self.at_upper[j] && dj < -COST_TOL {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| dj.abs() > self.d[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    /// Runs pivots until optimal; false when the budget runs out.
    fn iterate(&mut self, limit: u64) -> bool {
        let mut degenerate = 0u32;
        for _ in 0..limit {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some((j, dir)) = self.entering(bland) else {
                return true;
            };
            // Ratio test; `None` row means a bound flip of the entering
            // variable.
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.m {
                let alpha = dir * self.a[i * self.width + j];
                let b = self.basis[i];
                let (limit_i, to_upper) = if alpha > PIVOT_TOL {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                // Ties with a bound flip keep the flip.
                let better = if limit_i < step - 1e-12 {
                    true
                } else if limit_i <= step + 1e-12 {
                    match leave {
                        None => false,
                        Some((r, _)) if bland => b < self.basis[r],
                        Some((r, _)) => alpha.abs() > self.a[r * self.width + j].abs(),
                    }
                } else {
                    false
                };
                if better {
                    step = limit_i;
                    leave = Some((i, to_upper));
                }
            }
            if !step.is_finite() {
                // Unbounded direction; impossible with a boxed objective.
                return false;
            }
            if step > 1e-12 {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            for i in 0..self.m {
                let aij = self.a[i * self.width + j];
                if aij != 0.0 {
                    self.beta[i] -= dir * step * aij;
                }
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let start = if self.at_upper[j] { self.upper[j] } else { 0.0 };
                    let old = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = start + dir * step;
                    self.basic[old] = false;
                    self.at_upper[old] = to_upper;
                    self.basic[j] = true;
                    self.at_upper[j] = false;
                    self.basis[r] = j;
                }
            }
        }
        false
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width;
        let inv = 1.0 / self.a[r * w + j];
        let mut nz = Vec::new();
        for k in 0..w {
            let v = &mut self.a[r * w + k];
            if *v != 0.0 {
                *v *= inv;
                if v.abs() < DROP_TOL {
                    *v = 0.0;
                } else {
                    nz.push(k);
                }
            }
        }
        self.a[r * w + j] = 1.0;
        let (before, rest) = self.a.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[j];
            if f == 0.0 {
                continue;
            }
            for &k in &nz {
                let v = row[k] - f * pivot_row[k];
                row[k] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[j] = 0.0;
        }
        let f = self.d[j];
        if f != 0.0 {
            for &k in &nz {
                self.d[k] -= f * pivot_row[k];
            }
            self.d[j] = 0.0;
        }
    }

    fn structural_values(&self) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.n_struct)
            .map(|j| if self.at_upper[j] { self.upper[j] } else { 0.0 })
            .collect();
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.beta[i];
            }
        }
        x
    }
}
