//! Recovery of a periodic displacement from its symmetric gradient.
//!
//! The singular-integral reconstruction is, on a periodic lattice, a
//! per-frequency algebraic inversion of the symbol of the cell strain.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::dft2;
use crate::grid::{Sym2, Vec2};
use crate::math::sqrt;

/// `n x n` periodic lattice with spacing `h`. Node `(i, j)` and cell
/// `(i, j)` (lower-left corner at node `(i, j)`) are both indexed `i + j n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicGrid {
    pub n: usize,
    pub h: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { nx: n, ny: n });
        }
        if !(h > 0.0) {
            return Err(Error::BadSpacing(h));
        }
        Ok(PeriodicGrid { n, h })
    }

    fn wrap(&self, i: usize) -> usize {
        i % self.n
    }
}

/// Cell strains of a periodic nodal field, same stencil as the bounded grid.
pub fn periodic_sym_gradient(g: PeriodicGrid, u: &[Vec2]) -> Result<Vec<Sym2>> {
    let n = g.n;
    if u.len() != n * n {
        return Err(Error::Shape { expected: n * n, got: u.len() });
    }
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (i1, j1) = (g.wrap(i + 1), g.wrap(j + 1));
            let c = [u[i + j * n], u[i1 + j * n], u[i + j1 * n], u[i1 + j1 * n]];
            let dx = |k: usize| 0.5 * (c[1][k] + c[3][k] - c[0][k] - c[2][k]) / g.h;
            let dy = |k: usize| 0.5 * (c[2][k] + c[3][k] - c[0][k] - c[1][k]) / g.h;
            out.push(Sym2::new(dx(0), dy(1), 0.5 * (dy(0) + dx(1))));
        }
    }
    Ok(out)
}

/// Frequencies excluded from the reconstruction: the constant mode and the
/// checkerboard, both in the kernel of the stencil.
pub fn is_kernel_mode(n: usize, kx: usize, ky: usize) -> bool {
    (kx == 0 && ky == 0) || (n % 2 == 0 && kx == n / 2 && ky == n / 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmithResult {
    pub u: Vec<Vec2>,
    /// Relative L2 misfit `|e(u) - e| / |e|` (0 for zero input).
    pub residual: f64,
}

/// Least-squares inversion of the strain symbol per frequency; the kernel
/// modes are set to zero, so the output has zero mean and no checkerboard.
/// Incompatible input is not an error: its misfit shows up in `residual`.
pub fn smith_reconstruct(g: PeriodicGrid, e: &[Sym2]) -> Result<SmithResult> {
    let n = g.n;
    if e.len() != n * n {
        return Err(Error::Shape { expected: n * n, got: e.len() });
    }
    let r2 = core::f64::consts::SQRT_2;
    let mut ch: [Vec<Complex64>; 3] = [
        e.iter().map(|s| Complex64::new(s.xx, 0.0)).collect(),
        e.iter().map(|s| Complex64::new(s.yy, 0.0)).collect(),
        e.iter().map(|s| Complex64::new(r2 * s.xy, 0.0)).collect(),
    ];
    for c in ch.iter_mut() {
        dft2(c, n, n, false);
    }
    let mut u1 = vec![Complex64::new(0.0, 0.0); n * n];
    let mut u2 = vec![Complex64::new(0.0, 0.0); n * n];
    let one = Complex64::new(1.0, 0.0);
    for ky in 0..n {
        for kx in 0..n {
            if is_kernel_mode(n, kx, ky) {
                continue;
            }
            let tx = core::f64::consts::TAU * kx as f64 / n as f64;
            let ty = core::f64::consts::TAU * ky as f64 / n as f64;
            let ex = Complex64::from_polar(1.0, tx);
            let ey = Complex64::from_polar(1.0, ty);
            let dx = (ex - one) * (one + ey) * (0.5 / g.h);
            let dy = (ey - one) * (one + ex) * (0.5 / g.h);
            // Mandel rows: [dx, 0], [0, dy], [dy, dx]/sqrt 2.
            let a = [[dx, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), dy], [dy / r2, dx / r2]];
            let k = kx + ky * n;
            let b = [ch[0][k], ch[1][k], ch[2][k]];
            let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
            let mut rhs = [Complex64::new(0.0, 0.0); 2];
            for row in 0..3 {
                for p in 0..2 {
                    rhs[p] += a[row][p].conj() * b[row];
                    for q in 0..2 {
                        m[p][q] += a[row][p].conj() * a[row][q];
                    }
                }
            }
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.norm() <= 1e-300 {
                continue;
            }
            u1[k] = (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det;
            u2[k] = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
        }
    }
    dft2(&mut u1, n, n, true);
    dft2(&mut u2, n, n, true);
    let u: Vec<Vec2> = u1.iter().zip(&u2).map(|(a, b)| [a.re, b.re]).collect();
    let back = periodic_sym_gradient(g, &u)?;
    let num: f64 = back.iter().zip(e).map(|(a, b)| (*a - *b).norm_sq()).sum();
    let den: f64 = e.iter().map(|s| s.norm_sq()).sum();
    let residual = if den == 0.0 { sqrt(num) } else { sqrt(num / den) };
    Ok(SmithResult { u, residual })
}

/// Removes the kernel modes (mean, checkerboard) of a periodic nodal field.
pub fn strip_kernel_modes(g: PeriodicGrid, u: &[Vec2]) -> Vec<Vec2> {
    let n = g.n;
    let mut out = u.to_vec();
    for comp in 0..2 {
        let mean: f64 = u.iter().map(|v| v[comp]).sum::<f64>() / (n * n) as f64;
        let checker: f64 = if n % 2 == 0 {
            (0..n * n).map(|k| if (k % n + k / n) % 2 == 0 { u[k][comp] } else { -u[k][comp] }).sum::<f64>() / (n * n) as f64
        } else {
            0.0
        };
        for (k, v) in out.iter_mut().enumerate() {
            let s = if (k % n + k / n) % 2 == 0 { 1.0 } else { -1.0 };
            v[comp] -= mean + s * checker;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_in_zero_out() {
        let g = PeriodicGrid::new(8, 0.125).unwrap();
        let r = smith_reconstruct(g, &vec![Sym2::ZERO; 64]).unwrap();
        assert!(r.u.iter().all(|v| v[0] == 0.0 && v[1] == 0.0));
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn translations_are_invisible() {
        let g = PeriodicGrid::new(8, 0.125).unwrap();
        let u = vec![[2.0, -1.0]; 64];
        let e = periodic_sym_gradient(g, &u).unwrap();
        let r = smith_reconstruct(g, &e).unwrap();
        assert!(r.u.iter().all(|v| v[0].abs() < 1e-14 && v[1].abs() < 1e-14));
    }
}
