//! Banded symmetric positive definite storage and Cholesky factorisation.
//!
//! Lattice stiffness matrices with lexicographic node ordering have
//! half-bandwidth `2(nx - 1) + 1`, so a band solver is all the solver and the
//! divergence-free projection need.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{cell_strain_matrix, GridDomain};
use crate::math::sqrt;

/// Lower band of a symmetric matrix: entry `(i, j)` with `i - bw <= j <= i`
/// lives at `data[i * (bw + 1) + (i - j)]`.
#[derive(Clone, Debug)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedSym { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Adds `v` to entry `(i, j)`; only the lower triangle is stored, so
    /// callers add each symmetric pair once.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(r - c <= self.bw);
        self.data[r * (self.bw + 1) + (r - c)] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            0.0
        } else {
            self.data[r * (self.bw + 1) + (r - c)]
        }
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.n {
            self.data[i * (self.bw + 1)] += v;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[i * (self.bw + 1) + (i - j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky `A = L L^T`.
    pub fn cholesky(mut self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = self.data[i * w + (i - j)];
                let klo = lo.max(j.saturating_sub(bw));
                for k in klo..j {
                    s -= self.data[i * w + (i - k)] * self.data[j * w + (j - k)];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite(i));
                    }
                    self.data[i * w] = sqrt(s);
                } else {
                    self.data[i * w + (i - j)] = s / self.data[j * w];
                }
            }
        }
        Ok(BandCholesky { n, bw, data: self.data })
    }
}

#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.data[i * w + (i - k)] * y[k];
            }
            y[i] = s / self.data[i * w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            let hi = (i + bw).min(n - 1);
            for k in i + 1..=hi {
                s -= self.data[k * w + (k - i)] * y[k];
            }
            y[i] = s / self.data[i * w];
        }
        y
    }
}

/// Numbering of the interior-node dofs `(node, component)`.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub grid: GridDomain,
    /// dof of component 0 at each node, `None` on the boundary.
    pub node_dof: Vec<Option<usize>>,
    pub n_dofs: usize,
}

impl DofMap {
    pub fn interior(grid: GridDomain) -> Self {
        let mut node_dof = vec![None; grid.num_nodes()];
        let mut next = 0;
        for j in 1..grid.ny().saturating_sub(1) {
            for i in 1..grid.nx().saturating_sub(1) {
                node_dof[grid.node(i, j)] = Some(next);
                next += 2;
            }
        }
        DofMap { grid, node_dof, n_dofs: next }
    }

    /// Half-bandwidth of any cell-coupled matrix in this numbering.
    pub fn bandwidth(&self) -> usize {
        2 * (self.grid.nx().saturating_sub(2)) + 3
    }

    /// Local (8) to global dof map of a cell; `None` for boundary corners.
    pub fn cell_dofs(&self, ci: usize, cj: usize) -> [Option<usize>; 8] {
        let nodes = self.grid.cell_nodes(ci, cj);
        let mut out = [None; 8];
        for (a, &n) in nodes.iter().enumerate() {
            if let Some(d) = self.node_dof[n] {
                out[2 * a] = Some(d);
                out[2 * a + 1] = Some(d + 1);
            }
        }
        out
    }
}

/// Assembles `sum_cells h^2 B^T C_c B` where `C_c` is the 3x3 Mandel-form
/// material matrix of cell `c` and `B` the cell strain map.
pub fn assemble_stiffness(dofs: &DofMap, mut material: impl FnMut(usize) -> [[f64; 3]; 3]) -> BandedSym {
    let g = dofs.grid;
    let h2 = g.h() * g.h();
    let b = cell_strain_matrix(g.h());
    let mut k = BandedSym::zeros(dofs.n_dofs, dofs.bandwidth());
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let c = material(g.cell(ci, cj));
            // cb = C B (3x8)
            let mut cb = [[0.0; 8]; 3];
            for r in 0..3 {
                for q in 0..8 {
                    cb[r][q] = c[r][0] * b[0][q] + c[r][1] * b[1][q] + c[r][2] * b[2][q];
                }
            }
            let map = dofs.cell_dofs(ci, cj);
            for p in 0..8 {
                let Some(gp) = map[p] else { continue };
                for q in 0..=p {
                    let Some(gq) = map[q] else { continue };
                    let v = h2 * (b[0][p] * cb[0][q] + b[1][p] * cb[1][q] + b[2][p] * cb[2][q]);
                    if v != 0.0 {
                        k.add(gp, gq, v);
                    }
                }
            }
        }
    }
    k
}

/// Solves a small symmetric positive definite system by dense Cholesky.
pub fn dense_spd_solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let mut m = BandedSym::zeros(n, n.saturating_sub(1));
    for i in 0..n {
        for j in 0..=i {
            m.add(i, j, a[i * n + j]);
        }
    }
    Ok(m.cholesky()?.solve(b))
}
