//! Linear programs in inequality form and a small dense simplex.
//!
//! Problems are `maximize c^T x  s.t.  A x <= b`, each variable free or
//! nonnegative. [`DenseSimplex`] handles the small instances met in tests
//! (`b >= 0`, so the origin is feasible); large sparse instances go through
//! an external backend implementing [`LpSolver`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub free: Vec<bool>,
    /// Sparse rows `(variable, coefficient)` of `A x <= b`.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, free: bool) -> usize {
        self.objective.push(cost);
        self.free.push(free);
        self.objective.len() - 1
    }

    pub fn add_le(&mut self, row: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Objective value at `x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest constraint or sign violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let ax: f64 = row.iter().map(|&(j, a)| a * x[j]).sum();
            v = v.max(ax - b);
        }
        for (xi, free) in x.iter().zip(&self.free) {
            if !free {
                v = v.max(-xi);
            }
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

pub trait LpSolver {
    fn maximize(&self, lp: &LinearProgram) -> Result<LpSolution>;
    fn name(&self) -> &'static str;
}

/// Tableau simplex (phase 2 only, starting from the slack basis). Dantzig
/// pricing, switching to Bland's rule after a run of degenerate pivots; the
/// right-hand side is perturbed during pivoting and restored at the end.
#[derive(Clone, Copy, Debug)]
pub struct DenseSimplex {
    pub max_pivots: usize,
    pub tol: f64,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        DenseSimplex { max_pivots: 200_000, tol: 1e-10 }
    }
}

impl LpSolver for DenseSimplex {
    fn name(&self) -> &'static str {
        "dense-simplex"
    }

    fn maximize(&self, lp: &LinearProgram) -> Result<LpSolution> {
        if lp.rhs.iter().any(|&b| b < 0.0) {
            return Err(Error::Lp("dense simplex needs b >= 0".into()));
        }
        // Column layout: for each variable one column (two if free), then slacks.
        let mut col_of = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        for &f in &lp.free {
            col_of.push(ncols);
            ncols += if f { 2 } else { 1 };
        }
        let m = lp.rows.len();
        let width = ncols + m + 1;
        let mut t = vec![0.0; (m + 1) * width];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in row {
                let c = col_of[j];
                t[i * width + c] += a;
                if lp.free[j] {
                    t[i * width + c + 1] -= a;
                }
            }
            t[i * width + ncols + i] = 1.0;
            // Distinct small shifts keep every basis nondegenerate; the exact
            // right-hand side is restored through B^-1 at the end.
            let shift = 1e-7 * (1.0 + ((i * 7919) % 1009) as f64 / 1009.0);
            t[i * width + width - 1] = lp.rhs[i] + shift;
        }
        let z = m * width;
        for (j, &c) in lp.objective.iter().enumerate() {
            t[z + col_of[j]] = -c;
            if lp.free[j] {
                t[z + col_of[j] + 1] = c;
            }
        }
        let mut basis: Vec<usize> = (ncols..ncols + m).collect();
        let mut degenerate_run = 0usize;
        let mut pivots = 0usize;
        loop {
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = -self.tol;
            for c in 0..width - 1 {
                let r = t[z + c];
                if r < best {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    best = r;
                }
            }
            let Some(e) = enter else { break };
            let mut leave = None;
            let mut ratio = f64::INFINITY;
            for i in 0..m {
                let a = t[i * width + e];
                if a > self.tol {
                    let q = t[i * width + width - 1].max(0.0) / a;
                    let better = q < ratio - 1e-12
                        || (q <= ratio + 1e-12 && leave.map_or(true, |l: usize| basis[i] < basis[l]));
                    if better {
                        ratio = q;
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Err(Error::Lp("unbounded".into()));
            };
            degenerate_run = if ratio <= 1e-12 { degenerate_run + 1 } else { 0 };
            let p = t[l * width + e];
            for c in 0..width {
                t[l * width + c] /= p;
            }
            for i in 0..=m {
                if i == l {
                    continue;
                }
                let f = t[i * width + e];
                if f != 0.0 {
                    for c in 0..width {
                        t[i * width + c] -= f * t[l * width + c];
                    }
                }
            }
            for i in 0..m {
                let b = &mut t[i * width + width - 1];
                if *b < 0.0 && *b > -1e-11 {
                    *b = 0.0;
                }
            }
            basis[l] = e;
            pivots += 1;
            if pivots > self.max_pivots {
                return Err(Error::Lp(format!("pivot limit {} reached", self.max_pivots)));
            }
        }
        let mut cols = vec![0.0; ncols + m];
        for (i, &b) in basis.iter().enumerate() {
            // Slack columns of the final tableau hold B^-1.
            let xb: f64 = (0..m).map(|k| t[i * width + ncols + k] * lp.rhs[k]).sum();
            if xb < -1e-8 {
                return Err(Error::Lp("basis infeasible after removing the perturbation".into()));
            }
            cols[b] = xb.max(0.0);
        }
        let x: Vec<f64> = (0..lp.num_vars())
            .map(|j| {
                let c = col_of[j];
                if lp.free[j] {
                    cols[c] - cols[c + 1]
                } else {
                    cols[c]
                }
            })
            .collect();
        Ok(LpSolution { objective: lp.value(&x), x })
    }
}
