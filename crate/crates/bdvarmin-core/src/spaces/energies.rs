//! Weighted difference-quotient energies of strain fields and the exponent
//! thresholds of the regularity statements.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{sym_gradient, GridDomain, VectorField};
use crate::integrands::v_alpha_unchecked;
use crate::math::{powf, sin};

/// Smooth cutoff on cells: `sin^2`-bump in each direction over the cells
/// `[m, N - m)`, zero outside.
pub fn cutoff_window(grid: GridDomain, margin: usize) -> Vec<f64> {
    let (cx, cy) = (grid.cells_x(), grid.cells_y());
    let bump = |c: usize, n: usize| {
        if c < margin || c + margin >= n || n <= 2 * margin {
            0.0
        } else {
            let t = (c - margin) as f64 + 0.5;
            let w = (n - 2 * margin) as f64;
            let s = sin(core::f64::consts::PI * t / w);
            s * s
        }
    };
    let mut out = Vec::with_capacity(cx * cy);
    for cj in 0..cy {
        for ci in 0..cx {
            out.push(bump(ci, cx) * bump(cj, cy));
        }
    }
    out
}

fn check_common(v: &VectorField, axis: usize, steps: usize, rho: &[f64]) -> Result<()> {
    let g = v.grid;
    if rho.len() != g.num_cells() {
        return Err(Error::Shape { expected: g.num_cells(), got: rho.len() });
    }
    let ext = if axis == 0 { g.cells_x() } else { g.cells_y() };
    if axis > 1 || steps == 0 || steps >= ext {
        return Err(Error::ShiftTooLarge { axis, steps: steps as isize });
    }
    Ok(())
}

/// `sum rho^2 |tau_{s,t} V_alpha(e(v))|^2 / t^beta * omega h^2` with
/// `t = steps h` and
/// `omega = (1 + |e(x)|^2 + |e(x + t e_s)|^2)^{-(mu + 2(1 - alpha))/2}`,
/// over cells whose shifted partner exists.
pub fn weighted_dq_energy(v: &VectorField, mu: f64, alpha: f64, beta: f64, axis: usize, steps: usize, rho: &[f64]) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Param { name: "alpha", value: alpha, range: "(1, 2)" });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Param { name: "beta", value: beta, range: "(0, 1)" });
    }
    check_common(v, axis, steps, rho)?;
    let g = v.grid;
    let e = sym_gradient(v);
    let t = steps as f64 * g.h();
    let expo = -0.5 * (mu + 2.0 * (1.0 - alpha));
    let mut acc = 0.0;
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let (ai, aj) = if axis == 0 { (ci + steps, cj) } else { (ci, cj + steps) };
            if ai >= g.cells_x() || aj >= g.cells_y() {
                continue;
            }
            let r = rho[g.cell(ci, cj)];
            if r == 0.0 {
                continue;
            }
            let (x, y) = (e.at(ci, cj), e.at(ai, aj));
            let tau = v_alpha_unchecked(&y, alpha) - v_alpha_unchecked(&x, alpha);
            let w = powf(1.0 + x.norm_sq() + y.norm_sq(), expo);
            acc += r * r * tau.norm_sq() / powf(t, beta) * w;
        }
    }
    Ok(acc * g.h() * g.h())
}

/// `sum rho^2 |Delta_{s,t} e(v)|^2 (1 + |e(x + t e_s)|^2 + |e(x)|^2)^{-mu/2} h^2`.
pub fn second_order_energy(v: &VectorField, mu: f64, axis: usize, steps: usize, rho: &[f64]) -> Result<f64> {
    check_common(v, axis, steps, rho)?;
    let g = v.grid;
    let e = sym_gradient(v);
    let t = steps as f64 * g.h();
    let mut acc = 0.0;
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let (ai, aj) = if axis == 0 { (ci + steps, cj) } else { (ci, cj + steps) };
            if ai >= g.cells_x() || aj >= g.cells_y() {
                continue;
            }
            let r = rho[g.cell(ci, cj)];
            let (x, y) = (e.at(ci, cj), e.at(ai, aj));
            let d = (y - x).norm_sq() / (t * t);
            acc += r * r * d * powf(1.0 + x.norm_sq() + y.norm_sq(), -0.5 * mu);
        }
    }
    Ok(acc * g.h() * g.h())
}

/// Exponents of the regularity statements for dimension `n` and
/// ellipticity `mu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentReport {
    pub n: u32,
    pub mu: f64,
    /// `(2 - mu) 2n / (2n - 1)`: integrability exponent bound of the strain.
    pub q_max: f64,
    /// `(n + 1)/n`: Sobolev regularity and uniqueness range.
    pub w11_threshold: f64,
    /// `1 + 3/(2n)`: range of the viscosity result under the local BMO bound.
    pub viscosity_threshold: f64,
    /// `4n/(4n - 1)`: second-derivative range.
    pub second_derivative_threshold: f64,
    /// `2n/(2n - 1)`: higher integrability of the viscosity limit.
    pub higher_integrability_threshold: f64,
}

pub fn exponent_report(n: u32, mu: f64) -> Result<ExponentReport> {
    if n < 1 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if !(mu > 1.0) {
        return Err(Error::Param { name: "mu", value: mu, range: "(1, inf)" });
    }
    let nf = n as f64;
    Ok(ExponentReport {
        n,
        mu,
        q_max: (2.0 - mu) * 2.0 * nf / (2.0 * nf - 1.0),
        w11_threshold: (nf + 1.0) / nf,
        viscosity_threshold: 1.0 + 3.0 / (2.0 * nf),
        second_derivative_threshold: 4.0 * nf / (4.0 * nf - 1.0),
        higher_integrability_threshold: 2.0 * nf / (2.0 * nf - 1.0),
    })
}

/// Upper end of the admissible loss `eps` in the fractional embedding of
/// `BD ∩ BMO`: `min{(n - 1)(1 - 1/p)/(1 + pn - p), 1/p}`.
pub fn bd_bmo_eps_bound(n: u32, p: f64) -> f64 {
    let nf = n as f64;
    ((nf - 1.0) * (1.0 - 1.0 / p) / (1.0 + p * nf - p)).min(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_strain_has_zero_energies() {
        let g = GridDomain::unit_square(10).unwrap();
        let v = VectorField::from_fn(g, |x, y| [0.3 * x + 0.2 * y, -0.1 * x + 0.5 * y]);
        let rho = cutoff_window(g, 1);
        assert!(weighted_dq_energy(&v, 1.2, 1.5, 0.5, 0, 2, &rho).unwrap().abs() < 1e-20);
        assert!(second_order_energy(&v, 1.2, 1, 1, &rho).unwrap().abs() < 1e-20);
    }

    #[test]
    fn exponents_by_hand() {
        let r = exponent_report(2, 1.2).unwrap();
        assert!((r.q_max - 0.8 * 4.0 / 3.0).abs() < 1e-15);
        assert!((r.w11_threshold - 1.5).abs() < 1e-15);
        assert!((r.viscosity_threshold - 1.75).abs() < 1e-15);
        assert!((r.second_derivative_threshold - 8.0 / 7.0).abs() < 1e-15);
        assert!((r.higher_integrability_threshold - 4.0 / 3.0).abs() < 1e-15);
        assert!((bd_bmo_eps_bound(2, 2.0) - 1.0 / 6.0).abs() < 1e-15);
    }
}
