//! Dense two-phase tableau simplex for `min cᵀx, Ax = b, x ≥ 0`.
//!
//! Entering variable: most negative reduced cost, smallest index on ties.
//! After a run of degenerate pivots the solver switches to Bland's rule until
//! the next nondegenerate step. The tableau is periodically rebuilt from the
//! original data through an LU solve of the current basis, and optimality is
//! only declared on a freshly rebuilt tableau.
//!
//! Degeneracy is broken by solving with `b + Av` for a small fixed `v > 0`,
//! which keeps feasibility and redundant rows intact. The exact `b` is then
//! restored and any primal infeasibility is removed with dual simplex pivots
//! from the optimal (dual-feasible) basis.

use std::fmt;

use nalgebra::DMatrix;

const PIVOT_TOL: f64 = 1e-12;
const CANDIDATE_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-11;
const HARRIS_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 32;
const REFACTOR_EVERY: usize = 64;
const PERTURBATION: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct StandardLp {
    /// Constraint matrix, one row per equality.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    /// Simplex multipliers `π` with `cⱼ − πᵀAⱼ ≥ 0` at optimality.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexError {
    Infeasible(f64),
    Unbounded(usize),
    IterationLimit(usize),
    Breakdown(f64),
}

impl fmt::Display for SimplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplexError::Infeasible(r) => write!(f, "infeasible (phase-one residual {r:e})"),
            SimplexError::Unbounded(j) => write!(f, "unbounded along column {j}"),
            SimplexError::IterationLimit(n) => write!(f, "iteration limit {n} reached"),
            SimplexError::Breakdown(p) => write!(f, "numeric breakdown, pivot {p:e}"),
        }
    }
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `[A | I | b]` after sign normalization, kept for refactorization.
    original: DMatrix<f64>,
    /// `rows` constraint rows followed by the objective row; rhs in the last column.
    data: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.data[r * w + e];
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].iter().map(|v| v / p).collect();
        self.data[r * w..(r + 1) * w].copy_from_slice(&pivot_row);
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[e] = 0.0;
        }
        self.basis[r] = e;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    /// Recomputes `B⁻¹[A | I | b]` and the objective row from the original data.
    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.rows;
        let w = self.width;
        let basis_matrix = self.original.select_columns(self.basis.iter());
        let lu = basis_matrix.lu();
        let solved = lu
            .solve(&self.original)
            .ok_or(SimplexError::Breakdown(0.0))?;
        for i in 0..m {
            for j in 0..w {
                self.data[i * w + j] = solved[(i, j)];
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            for k in 0..m {
                self.data[k * w + b] = if k == i { 1.0 } else { 0.0 };
            }
        }
        self.since_refactor = 0;
        self.price();
        Ok(())
    }

    /// Objective row `c − c_B·B⁻¹A` from the current constraint rows.
    fn price(&mut self) {
        let w = self.width;
        let obj = self.rows;
        for j in 0..w {
            self.data[obj * w + j] = if j < self.cost.len() { self.cost[j] } else { 0.0 };
        }
        for i in 0..self.rows {
            let cb = self.cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                self.data[obj * w + j] -= cb * self.data[i * w + j];
            }
        }
    }

    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        let obj = self.rows;
        let mut entering = None;
        let mut best = -COST_TOL;
        for j in 0..allowed {
            let d = self.at(obj, j);
            if d < best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = d;
            }
        }
        entering
    }

    /// Two-pass ratio test: bound the step with slightly relaxed bounds, then
    /// take the largest pivot (or smallest basic index under Bland) among rows
    /// whose exact ratio stays within that bound.
    fn leaving(&self, e: usize, bland: bool) -> Option<(usize, f64)> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let t = self.at(i, e);
            if t > CANDIDATE_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + HARRIS_TOL) / t);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let t = self.at(i, e);
            if t <= CANDIDATE_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / t;
            if ratio > bound {
                continue;
            }
            pick = match pick {
                None => Some((i, ratio)),
                Some((li, lr)) => {
                    let better = if bland {
                        self.basis[i] < self.basis[li]
                    } else {
                        t > self.at(li, e)
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((li, lr))
                    }
                }
            };
        }
        pick
    }

    /// Runs simplex iterations over the columns `0..allowed` until the
    /// refactored tableau is optimal.
    fn optimize(&mut self, allowed: usize, limit: usize) -> Result<(), SimplexError> {
        let mut degenerate = 0usize;
        loop {
            if self.since_refactor >= REFACTOR_EVERY.max(self.rows / 2) {
                self.refactor()?;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(e) = self.entering(allowed, bland) else {
                if self.since_refactor == 0 {
                    return Ok(());
                }
                self.refactor()?;
                continue;
            };
            let Some((r, ratio)) = self.leaving(e, bland) else {
                return Err(SimplexError::Unbounded(e));
            };
            let p = self.at(r, e);
            if p.abs() < PIVOT_TOL {
                return Err(SimplexError::Breakdown(p));
            }
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
            if self.pivots > limit {
                return Err(SimplexError::IterationLimit(limit));
            }
        }
    }
}

impl Tableau {
    /// Dual simplex pivots until every basic value is nonnegative.
    fn restore_feasibility(&mut self, allowed: usize, limit: usize) -> Result<(), SimplexError> {
        loop {
            if self.since_refactor >= REFACTOR_EVERY.max(self.rows / 2) {
                self.refactor()?;
            }
            let mut leave = None;
            let mut worst = -FEASIBILITY_TOL * 1e-2;
            for i in 0..self.rows {
                let v = self.rhs(i);
                if v < worst {
                    worst = v;
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                if self.since_refactor == 0 {
                    return Ok(());
                }
                self.refactor()?;
                continue;
            };
            let obj = self.rows;
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..allowed {
                let a = self.at(r, j);
                if a >= -CANDIDATE_TOL {
                    continue;
                }
                let ratio = self.at(obj, j).max(0.0) / -a;
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && -a > -ba),
                };
                if better {
                    enter = Some((j, ratio, a));
                }
            }
            let Some((e, _, _)) = enter else {
                return Err(SimplexError::Infeasible(-worst));
            };
            self.pivot(r, e);
            if self.pivots > limit {
                return Err(SimplexError::IterationLimit(limit));
            }
        }
    }

    fn set_rhs(&mut self, rhs: &[f64]) {
        let last = self.width - 1;
        for (i, v) in rhs.iter().enumerate() {
            self.original[(i, last)] = *v;
        }
    }
}

pub fn solve(lp: &StandardLp) -> Result<SimplexResult, SimplexError> {
    let m = lp.a.len();
    let n = lp.c.len();
    let width = n + m + 1;
    let mut original = DMatrix::zeros(m, width);
    let mut sign = vec![1.0; m];
    for i in 0..m {
        if lp.b[i] < 0.0 {
            sign[i] = -1.0;
        }
        for j in 0..n {
            original[(i, j)] = sign[i] * lp.a[i][j];
        }
        original[(i, n + i)] = 1.0;
        original[(i, width - 1)] = sign[i] * lp.b[i];
    }
    let exact_rhs: Vec<f64> = (0..m).map(|i| original[(i, width - 1)]).collect();
    let scale = exact_rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for j in 0..n {
        // deterministic, pairwise distinct weights in [1, 2)
        let v = PERTURBATION * scale * (1.0 + ((j as f64) * 0.618_033_988_749_895).fract());
        for i in 0..m {
            let a = original[(i, j)];
            original[(i, width - 1)] += a * v;
        }
    }
    let mut data = vec![0.0; (m + 1) * width];
    for i in 0..m {
        for j in 0..width {
            data[i * width + j] = original[(i, j)];
        }
    }
    let mut phase_one = vec![0.0; n + m];
    phase_one[n..].iter_mut().for_each(|v| *v = 1.0);
    let mut t = Tableau {
        rows: m,
        width,
        original,
        data,
        basis: (n..n + m).collect(),
        cost: phase_one,
        pivots: 0,
        since_refactor: 0,
    };
    let limit = 50 * (m + n) + 1000;

    t.price();
    t.optimize(n, limit)?;
    let residual: f64 = (0..m).filter(|&i| t.basis[i] >= n).map(|i| t.rhs(i).abs()).sum();
    if residual > FEASIBILITY_TOL {
        return Err(SimplexError::Infeasible(residual));
    }
    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            let v = t.at(i, j).abs();
            if v > CANDIDATE_TOL && best.is_none_or(|(_, b)| v > b) {
                best = Some((j, v));
            }
        }
        if let Some((j, _)) = best {
            t.pivot(i, j);
        }
    }

    t.cost = lp.c.clone();
    t.cost.extend(std::iter::repeat_n(0.0, m));
    t.refactor()?;
    t.optimize(n, limit)?;
    t.set_rhs(&exact_rhs);
    t.refactor()?;
    t.restore_feasibility(n, limit)?;

    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let duals = (0..m).map(|i| -sign[i] * t.at(m, n + i)).collect();
    let objective = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(SimplexResult {
        x,
        duals,
        objective,
        pivots: t.pivots,
    })
}
