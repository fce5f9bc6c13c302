//! Lower bounds for `sup { ||Du||_1 : ||e(u)||_1 <= 1, u = 0 on the boundary }`
//! with entrywise l1 matrix norms, by sign ascent over linear programs.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{full_gradient, sym_gradient, GridDomain, VectorField, DX, DY};
use crate::linalg::DofMap;
use crate::lp::{LinearProgram, LpSolver};

/// `sum |D_kl| h^2` over cells and entries.
pub fn gradient_l1(u: &VectorField) -> f64 {
    let h2 = u.grid.h() * u.grid.h();
    full_gradient(u).values.iter().map(|m| m.entry_l1()).sum::<f64>() * h2
}

/// `sum (|e11| + |e22| + 2|e12|) h^2`.
pub fn strain_l1(u: &VectorField) -> f64 {
    let h2 = u.grid.h() * u.grid.h();
    sym_gradient(u).values.iter().map(|e| e.entry_l1()).sum::<f64>() * h2
}

/// `gradient_l1 / strain_l1`, 0 when both vanish.
pub fn ornstein_quotient(u: &VectorField) -> f64 {
    let d = gradient_l1(u);
    let e = strain_l1(u);
    if e == 0.0 {
        if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        d / e
    }
}

#[derive(Clone, Debug)]
pub struct OrnsteinResult {
    pub ratio: f64,
    pub maximiser: VectorField,
    /// LP solves performed.
    pub lp_solves: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct OrnsteinOptions {
    pub starts: usize,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for OrnsteinOptions {
    fn default() -> Self {
        OrnsteinOptions { starts: 3, max_rounds: 40, seed: 0 }
    }
}

/// Cell-entry coefficients: `D_kl = sum_a u_k(a) c_l(a) / h`.
struct Layout {
    dofs: DofMap,
}

impl Layout {
    /// `(dof, coefficient)` list of `D_kl` in cell `(ci, cj)`.
    fn entry(&self, ci: usize, cj: usize, k: usize, l: usize) -> Vec<(usize, f64)> {
        let g = self.dofs.grid;
        let w = if l == 0 { DX } else { DY };
        let mut out = Vec::with_capacity(4);
        for (a, &n) in g.cell_nodes(ci, cj).iter().enumerate() {
            if let Some(d) = self.dofs.node_dof[n] {
                out.push((d + k, w[a] / g.h()));
            }
        }
        out
    }
}

fn signs_lp(layout: &Layout, signs: &[[f64; 4]]) -> LinearProgram {
    let g = layout.dofs.grid;
    let h2 = g.h() * g.h();
    let mut lp = LinearProgram::new();
    let mut obj = vec![0.0; layout.dofs.n_dofs];
    for _ in 0..layout.dofs.n_dofs {
        lp.add_var(0.0, true);
    }
    let mut budget = Vec::new();
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let c = g.cell(ci, cj);
            for k in 0..2 {
                for l in 0..2 {
                    for (d, a) in layout.entry(ci, cj, k, l) {
                        obj[d] += signs[c][2 * k + l] * a * h2;
                    }
                }
            }
            // e11, e22, e12 with weights 1, 1, 2.
            let d00 = layout.entry(ci, cj, 0, 0);
            let d11 = layout.entry(ci, cj, 1, 1);
            let mut e12 = layout.entry(ci, cj, 0, 1);
            e12.extend(layout.entry(ci, cj, 1, 0));
            for v in e12.iter_mut() {
                v.1 *= 0.5;
            }
            for (row, w) in [(d00, 1.0), (d11, 1.0), (e12, 2.0)] {
                let t = lp.add_var(0.0, false);
                let mut plus = row.clone();
                plus.push((t, -1.0));
                let mut minus: Vec<(usize, f64)> = row.iter().map(|&(d, a)| (d, -a)).collect();
                minus.push((t, -1.0));
                lp.add_le(plus, 0.0);
                lp.add_le(minus, 0.0);
                budget.push((t, w * h2));
            }
        }
    }
    lp.add_le(budget, 1.0);
    for (d, c) in obj.into_iter().enumerate() {
        lp.objective[d] = c;
    }
    lp
}

fn field_from(layout: &Layout, x: &[f64]) -> VectorField {
    let g = layout.dofs.grid;
    let mut v = VectorField::zeros(g);
    for (n, d) in layout.dofs.node_dof.iter().enumerate() {
        if let Some(d) = *d {
            v.values[n] = [x[d], x[d + 1]];
        }
    }
    v
}

/// Best quotient found by sign ascent: fix the signs of `Du`, maximise the
/// resulting linear functional over the strain ball, update the signs from
/// the maximiser, repeat while the quotient grows. Each start draws random
/// signs from `seed`.
pub fn ornstein_experiment(grid: GridDomain, solver: &dyn LpSolver, opts: OrnsteinOptions) -> Result<OrnsteinResult> {
    if grid.nx() < 8 || grid.ny() < 8 {
        return Err(Error::GridTooSmall { nx: grid.nx(), ny: grid.ny() });
    }
    let layout = Layout { dofs: DofMap::interior(grid) };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, VectorField)> = None;
    let mut solves = 0;
    for _ in 0..opts.starts.max(1) {
        let mut signs: Vec<[f64; 4]> = (0..grid.num_cells())
            .map(|_| {
                let mut s = [0.0; 4];
                for v in s.iter_mut() {
                    *v = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                }
                s
            })
            .collect();
        let mut last = f64::NEG_INFINITY;
        for _ in 0..opts.max_rounds {
            let lp = signs_lp(&layout, &signs);
            let sol = solver.maximize(&lp)?;
            solves += 1;
            let u = field_from(&layout, &sol.x);
            let q = ornstein_quotient(&u);
            if !(q > last * (1.0 + 1e-9)) {
                break;
            }
            last = q;
            let du = full_gradient(&u);
            for (s, m) in signs.iter_mut().zip(&du.values) {
                for k in 0..2 {
                    for l in 0..2 {
                        let v = m.0[k][l];
                        if v != 0.0 {
                            s[2 * k + l] = v.signum();
                        }
                    }
                }
            }
            if best.as_ref().map_or(true, |b| q > b.0) {
                best = Some((q, u));
            }
        }
    }
    let (ratio, maximiser) = best.ok_or_else(|| Error::Lp("no LP solve succeeded".into()))?;
    Ok(OrnsteinResult { ratio, maximiser, lp_solves: solves })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rigid_with_zero_boundary_is_zero() {
        let g = GridDomain::unit_square(8).unwrap();
        let u = VectorField::zeros(g);
        assert_eq!(ornstein_quotient(&u), 0.0);
    }

    #[test]
    fn quotient_at_least_one_for_symmetric_gradients() {
        // |D|_1 >= |e|_1 entrywise: |a| + |b| >= |a + b|.
        let g = GridDomain::unit_square(9).unwrap();
        let u = VectorField::from_fn(g, |x, y| [x * (1.0 - x) * y * (1.0 - y), (x * y).sin() * x * (1.0 - x) * y * (1.0 - y)]);
        assert!(ornstein_quotient(&u) >= 1.0);
    }
}
