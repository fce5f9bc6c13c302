//! Dual problem over divergence-free stresses, duality gaps and the dual
//! norm of `W_0^{1,inf}` computed by linear programming.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{divergence, interior_div_norm, sym_gradient, GridDomain, Sym2, SymTensorField, Vec2, VectorField};
use crate::integrands::Integrand;
use crate::linalg::{assemble_stiffness, BandCholesky, DofMap};
use crate::lp::{LinearProgram, LpSolver};
use crate::math::sqrt;

/// Identity material in Mandel coordinates: the Frobenius product.
const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Reusable factorisation of the normal equations `e^T e` on interior dofs.
#[derive(Clone, Debug)]
pub struct DivFreeProjector {
    dofs: DofMap,
    chol: Option<BandCholesky>,
}

impl DivFreeProjector {
    pub fn new(grid: GridDomain) -> Result<Self> {
        let dofs = DofMap::interior(grid);
        let chol = if dofs.n_dofs == 0 { None } else { Some(assemble_stiffness(&dofs, |_| IDENTITY).cholesky()?) };
        Ok(DivFreeProjector { dofs, chol })
    }

    /// `s - e(phi)` with `phi` the least-squares fit of `s` by strains of
    /// fields vanishing on the boundary.
    pub fn project(&self, s: &SymTensorField) -> Result<SymTensorField> {
        let g = self.dofs.grid;
        if !g.same_shape(&s.grid) {
            return Err(Error::Shape { expected: g.num_cells(), got: s.values.len() });
        }
        let Some(chol) = &self.chol else { return Ok(s.clone()) };
        let div = divergence(s);
        let h2 = g.h() * g.h();
        let mut rhs = vec![0.0; self.dofs.n_dofs];
        for (n, d) in self.dofs.node_dof.iter().enumerate() {
            if let Some(d) = *d {
                rhs[d] = -h2 * div.values[n][0];
                rhs[d + 1] = -h2 * div.values[n][1];
            }
        }
        let mut sol = chol.solve(&rhs);
        // One step of iterative refinement.
        let mut phi = self.to_field(&sol, s.grid);
        let r = s.sub(&sym_gradient(&phi));
        if interior_div_norm(&r) > 1e-13 * (1.0 + s.l2_norm()) {
            let d2 = divergence(&r);
            for (n, d) in self.dofs.node_dof.iter().enumerate() {
                if let Some(d) = *d {
                    rhs[d] = -h2 * d2.values[n][0];
                    rhs[d + 1] = -h2 * d2.values[n][1];
                }
            }
            let corr = chol.solve(&rhs);
            for (a, b) in sol.iter_mut().zip(corr) {
                *a += b;
            }
            phi = self.to_field(&sol, s.grid);
        }
        Ok(s.sub(&sym_gradient(&phi)))
    }

    fn to_field(&self, x: &[f64], grid: GridDomain) -> VectorField {
        let mut v = VectorField::zeros(grid);
        for (n, d) in self.dofs.node_dof.iter().enumerate() {
            if let Some(d) = *d {
                v.values[n] = [x[d], x[d + 1]];
            }
        }
        v
    }
}

/// Orthogonal projection (cell inner product) onto the kernel of the
/// interior divergence.
pub fn project_div_free(s: &SymTensorField) -> Result<SymTensorField> {
    DivFreeProjector::new(s.grid)?.project(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualCandidate {
    pub chi: SymTensorField,
    pub div_residual: f64,
    /// `|chi| <= c_inf` in every cell and `div_residual <= tol`.
    pub feasible: bool,
}

/// Default divergence tolerance for feasibility.
pub const DIV_TOL: f64 = 1e-8;

impl DualCandidate {
    pub fn new(chi: SymTensorField, f: &Integrand, tol: f64) -> Self {
        let div_residual = interior_div_norm(&chi);
        let c = f.recession();
        let bounded = chi.values.iter().all(|s| s.norm() <= c * (1.0 + 1e-12));
        DualCandidate { feasible: bounded && div_residual <= tol, chi, div_residual }
    }

    /// Projects `s` onto divergence-free fields and shrinks it uniformly into
    /// the ball `|chi| <= c_inf` if it sticks out.
    pub fn from_stress(s: &SymTensorField, f: &Integrand) -> Result<Self> {
        let mut chi = project_div_free(s)?;
        let c = f.recession();
        let m = chi.max_norm();
        if c.is_finite() && m > c {
            chi = chi.scaled(c / m);
        }
        Ok(Self::new(chi, f, DIV_TOL))
    }
}

/// `R[chi] = sum <chi, e(u0)> h^2 - sum f*(chi) h^2`, or `-inf` when `chi`
/// is infeasible.
pub fn dual_value(chi: &DualCandidate, u0: &VectorField, f: &Integrand) -> f64 {
    if !chi.feasible {
        return f64::NEG_INFINITY;
    }
    let e0 = sym_gradient(u0);
    let h2 = u0.grid.h() * u0.grid.h();
    let mut acc = 0.0;
    for (c, e) in chi.chi.values.iter().zip(&e0.values) {
        let fs = f.conjugate_fn(c);
        if fs == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        acc += c.dot(e) - fs;
    }
    acc * h2
}

/// `primal - R[chi]`; errors on infeasible candidates.
pub fn duality_gap(primal: f64, chi: &DualCandidate, u0: &VectorField, f: &Integrand) -> Result<f64> {
    if !chi.feasible {
        return Err(Error::Infeasible(format!(
            "div residual {:e}, max |chi| {:e}",
            chi.div_residual,
            chi.chi.max_norm()
        )));
    }
    Ok(primal - dual_value(chi, u0, f))
}

/// Per-cell Fenchel-Young excess `f(xi) + f*(eta) - <eta, xi>`.
pub fn fenchel_young_excess(f: &Integrand, xi: &Sym2, eta: &Sym2) -> f64 {
    f.eval(xi) + f.conjugate_fn(eta) - eta.dot(xi)
}

/// Discrete `H^1` seminorm of a cell field, from forward differences along
/// both axes.
pub fn stress_h1_seminorm(s: &SymTensorField) -> f64 {
    let g = s.grid;
    let (cx, cy) = (g.cells_x(), g.cells_y());
    let mut acc = 0.0;
    for cj in 0..cy {
        for ci in 0..cx {
            let a = s.at(ci, cj);
            if ci + 1 < cx {
                acc += (s.at(ci + 1, cj) - a).norm_sq();
            }
            if cj + 1 < cy {
                acc += (s.at(ci, cj + 1) - a).norm_sq();
            }
        }
    }
    // |D s|^2 h^2 with D s ~ difference / h.
    sqrt(acc)
}

/// Nodal weights times `h^2`, turning a density into a functional.
pub fn density_to_weights(t: &VectorField) -> Vec<Vec2> {
    let h2 = t.grid.h() * t.grid.h();
    t.values.iter().map(|v| [v[0] * h2, v[1] * h2]).collect()
}

/// `sup { sum_a <T_a, phi(a)> : phi = 0 on the boundary, |phi(a) - phi(b)| <= h
/// on lattice edges }`, each component separately, summed.
///
/// The per-edge bound is the max-norm choice of `|grad phi| <= 1`; with it a
/// unit dipole at lattice distance `d` (paths avoiding the boundary) has
/// norm `d`.
pub fn lip_dual_norm(grid: GridDomain, weights: &[Vec2], solver: &dyn LpSolver) -> Result<f64> {
    if weights.len() != grid.num_nodes() {
        return Err(Error::Shape { expected: grid.num_nodes(), got: weights.len() });
    }
    let mut total = 0.0;
    for comp in 0..2 {
        let t: Vec<f64> = weights.iter().map(|w| w[comp]).collect();
        if t.iter().all(|&x| x == 0.0) {
            continue;
        }
        total += scalar_lip_dual(grid, &t, solver)?;
    }
    Ok(total)
}

fn scalar_lip_dual(grid: GridDomain, t: &[f64], solver: &dyn LpSolver) -> Result<f64> {
    let mut lp = LinearProgram::new();
    let mut var = vec![None; grid.num_nodes()];
    for j in 1..grid.ny() - 1 {
        for i in 1..grid.nx() - 1 {
            let n = grid.node(i, j);
            var[n] = Some(lp.add_var(t[n], true));
        }
    }
    if lp.num_vars() == 0 {
        return Ok(0.0);
    }
    let h = grid.h();
    let mut edge = |a: Option<usize>, b: Option<usize>| {
        let mut row = Vec::with_capacity(2);
        if let Some(a) = a {
            row.push((a, 1.0));
        }
        if let Some(b) = b {
            row.push((b, -1.0));
        }
        if row.is_empty() {
            return;
        }
        let neg: Vec<(usize, f64)> = row.iter().map(|&(v, c)| (v, -c)).collect();
        lp.add_le(row, h);
        lp.add_le(neg, h);
    };
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let a = var[grid.node(i, j)];
            if i + 1 < grid.nx() {
                edge(a, var[grid.node(i + 1, j)]);
            }
            if j + 1 < grid.ny() {
                edge(a, var[grid.node(i, j + 1)]);
            }
        }
    }
    let sol = solver.maximize(&lp)?;
    Ok(sol.objective.max(0.0))
}

/// Closed form of [`lip_dual_norm`] for a unit dipole `delta_a - delta_b`
/// between interior nodes: `h min(|a - b|_1, dist(a) + dist(b))`, with
/// `dist` the lattice distance to the boundary.
pub fn dipole_norm(grid: GridDomain, a: (usize, usize), b: (usize, usize)) -> f64 {
    let dist = |p: (usize, usize)| p.0.min(p.1).min(grid.nx() - 1 - p.0).min(grid.ny() - 1 - p.1);
    let man = a.0.abs_diff(b.0) + a.1.abs_diff(b.1);
    grid.h() * man.min(dist(a) + dist(b)) as f64
}

/// Weights of `Delta_{s,h} v` (step `steps` lattice units along `axis`) with
/// `v` extended by zero outside the grid.
pub fn delta_functional(v: &VectorField, axis: usize, steps: usize) -> Result<Vec<Vec2>> {
    let g = v.grid;
    if axis > 1 || steps == 0 {
        return Err(Error::Invalid("axis must be 0 or 1 and steps positive".into()));
    }
    let step = steps as f64 * g.h();
    let h2 = g.h() * g.h();
    let mut out = vec![[0.0; 2]; g.num_nodes()];
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (i2, j2) = if axis == 0 { (i + steps, j) } else { (i, j + steps) };
            let ahead = if i2 < g.nx() && j2 < g.ny() { v.at(i2, j2) } else { [0.0, 0.0] };
            let here = v.at(i, j);
            out[g.node(i, j)] = [(ahead[0] - here[0]) / step * h2, (ahead[1] - here[1]) / step * h2];
        }
    }
    Ok(out)
}

/// Weights of the residual functional `phi -> sum <s, e(phi)> h^2`.
pub fn residual_functional(s: &SymTensorField) -> Vec<Vec2> {
    let d = divergence(s);
    let h2 = s.grid.h() * s.grid.h();
    d.values.iter().map(|v| [-v[0] * h2, -v[1] * h2]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::DenseSimplex;
    use rand::{Rng, SeedableRng};

    fn random_cells(g: GridDomain, seed: u64) -> SymTensorField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..g.num_cells())
            .map(|_| Sym2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SymTensorField::new(g, vals).unwrap()
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint() {
        let g = GridDomain::unit_square(9).unwrap();
        let p = DivFreeProjector::new(g).unwrap();
        let a = random_cells(g, 1);
        let b = random_cells(g, 2);
        let pa = p.project(&a).unwrap();
        let pb = p.project(&b).unwrap();
        assert!(interior_div_norm(&pa) < 1e-12);
        assert!(p.project(&pa).unwrap().sub(&pa).max_norm() < 1e-10);
        assert!((pa.dot(&b) - a.dot(&pb)).abs() < 1e-10);
    }

    #[test]
    fn constants_are_fixed() {
        let g = GridDomain::unit_square(7).unwrap();
        let c = SymTensorField::constant(g, Sym2::new(0.3, -0.2, 0.5));
        assert!(project_div_free(&c).unwrap().sub(&c).max_norm() < 1e-10);
    }

    #[test]
    fn zero_stress_area_dual() {
        let g = GridDomain::unit_square(5).unwrap();
        let f = Integrand::area();
        let chi = DualCandidate::new(SymTensorField::zeros(g), &f, DIV_TOL);
        let u0 = VectorField::from_fn(g, |x, y| [x * y, 0.0]);
        assert!((dual_value(&chi, &u0, &f) - g.area()).abs() < 1e-14);
        let bad = DualCandidate::new(SymTensorField::constant(g, Sym2::new(2.0, 0.0, 0.0)), &f, DIV_TOL);
        assert!(!bad.feasible);
        assert_eq!(dual_value(&bad, &u0, &f), f64::NEG_INFINITY);
        assert!(duality_gap(1.0, &bad, &u0, &f).is_err());
    }

    #[test]
    fn dipole_lp_matches_closed_form() {
        let g = GridDomain::unit_square(7).unwrap();
        let lp = DenseSimplex::default();
        for (a, b) in [((2, 2), (4, 3)), ((1, 1), (5, 5)), ((3, 1), (3, 5)), ((2, 3), (3, 3))] {
            let mut w = vec![[0.0; 2]; g.num_nodes()];
            w[g.node(a.0, a.1)][0] = 1.0;
            w[g.node(b.0, b.1)][0] = -1.0;
            let v = lip_dual_norm(g, &w, &lp).unwrap();
            assert!((v - dipole_norm(g, a, b)).abs() < 1e-9, "{a:?} {b:?} {v}");
        }
        assert_eq!(lip_dual_norm(g, &vec![[0.0; 2]; g.num_nodes()], &lp).unwrap(), 0.0);
    }
}
