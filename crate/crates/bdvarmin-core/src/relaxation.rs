//! Piecewise-constant fields with face jumps, convex functions of the
//! resulting symmetric measures, and the relaxed functional with its
//! boundary penalty.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{sym_gradient, vnorm, vsub, GridDomain, Sym2, SymTensorField, Vec2, VectorField};
use crate::integrands::Integrand;
use crate::math::{cos, sin, sqrt};
use crate::solver::ViscositySolution;

/// Piecewise-constant part on cells plus an optional nodal (Lipschitz) part.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteBDField {
    pub grid: GridDomain,
    pub cell_values: Vec<Vec2>,
    pub smooth_part: Option<VectorField>,
}

impl DiscreteBDField {
    pub fn new(grid: GridDomain, cell_values: Vec<Vec2>, smooth_part: Option<VectorField>) -> Result<Self> {
        if cell_values.len() != grid.num_cells() {
            return Err(Error::Shape { expected: grid.num_cells(), got: cell_values.len() });
        }
        if let Some(s) = &smooth_part {
            if !s.grid.same_shape(&grid) {
                return Err(Error::Shape { expected: grid.num_nodes(), got: s.values.len() });
            }
        }
        if cell_values.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::Invalid("non-finite cell value".into()));
        }
        Ok(DiscreteBDField { grid, cell_values, smooth_part })
    }

    /// A nodal field seen as a BD field without jumps.
    pub fn from_smooth(v: &VectorField) -> Self {
        DiscreteBDField { grid: v.grid, cell_values: alloc::vec![[0.0; 2]; v.grid.num_cells()], smooth_part: Some(v.clone()) }
    }

    pub fn from_cells(grid: GridDomain, f: impl Fn(f64, f64) -> Vec2) -> Self {
        let mut vals = Vec::with_capacity(grid.num_cells());
        for cj in 0..grid.cells_y() {
            for ci in 0..grid.cells_x() {
                let (x, y) = grid.cell_center(ci, cj);
                vals.push(f(x, y));
            }
        }
        DiscreteBDField { grid, cell_values: vals, smooth_part: None }
    }

    /// Adds a rigid motion `x -> (a - c y, b + c x)` to the smooth part.
    pub fn plus_rigid(&self, r: Rigid) -> Self {
        let add = VectorField::from_fn(self.grid, |x, y| r.at(x, y));
        let smooth = match &self.smooth_part {
            Some(s) => s.add(&add),
            None => add,
        };
        DiscreteBDField { smooth_part: Some(smooth), ..self.clone() }
    }

    /// Inner trace on boundary face `k` (see [`boundary_faces`]).
    fn trace(&self, face: &BoundaryFace) -> Vec2 {
        let mut t = self.cell_values[self.grid.cell(face.cell.0, face.cell.1)];
        if let Some(s) = &self.smooth_part {
            let a = s.values[face.nodes.0];
            let b = s.values[face.nodes.1];
            t[0] += 0.5 * (a[0] + b[0]);
            t[1] += 0.5 * (a[1] + b[1]);
        }
        t
    }
}

/// `x -> (a - c y, b + c x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rigid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Rigid {
    pub fn at(&self, x: f64, y: f64) -> Vec2 {
        [self.a - self.c * y, self.b + self.c * x]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceOrientation {
    /// Between cells `(ci, cj)` and `(ci + 1, cj)`, normal `e1`.
    Vertical,
    /// Between cells `(ci, cj)` and `(ci, cj + 1)`, normal `e2`.
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceJump {
    pub cell: (usize, usize),
    pub orientation: FaceOrientation,
    /// `(u+ - u-) ⊙ nu`, per unit length.
    pub jump: Sym2,
    pub length: f64,
}

/// Symmetric-matrix valued measure: cell density plus face jumps.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMeasure {
    pub ac: SymTensorField,
    pub jumps: Vec<FaceJump>,
}

impl SymMeasure {
    pub fn total_variation(&self) -> f64 {
        let h2 = self.ac.grid.h() * self.ac.grid.h();
        self.ac.values.iter().map(Sym2::norm).sum::<f64>() * h2
            + self.jumps.iter().map(|j| j.jump.norm() * j.length).sum::<f64>()
    }
}

/// Jumps across interior faces plus the strain of the smooth part.
pub fn bd_measure(u: &DiscreteBDField) -> SymMeasure {
    let g = u.grid;
    let ac = match &u.smooth_part {
        Some(s) => sym_gradient(s),
        None => SymTensorField::zeros(g),
    };
    let mut jumps = Vec::new();
    let (cx, cy) = (g.cells_x(), g.cells_y());
    for cj in 0..cy {
        for ci in 0..cx {
            let here = u.cell_values[g.cell(ci, cj)];
            if ci + 1 < cx {
                let d = vsub(u.cell_values[g.cell(ci + 1, cj)], here);
                if d != [0.0, 0.0] {
                    jumps.push(FaceJump {
                        cell: (ci, cj),
                        orientation: FaceOrientation::Vertical,
                        jump: Sym2::sym_product(d, [1.0, 0.0]),
                        length: g.h(),
                    });
                }
            }
            if cj + 1 < cy {
                let d = vsub(u.cell_values[g.cell(ci, cj + 1)], here);
                if d != [0.0, 0.0] {
                    jumps.push(FaceJump {
                        cell: (ci, cj),
                        orientation: FaceOrientation::Horizontal,
                        jump: Sym2::sym_product(d, [0.0, 1.0]),
                        length: g.h(),
                    });
                }
            }
        }
    }
    SymMeasure { ac, jumps }
}

/// Rectangle of cells `[ci0, ci1) x [cj0, cj1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub ci0: usize,
    pub ci1: usize,
    pub cj0: usize,
    pub cj1: usize,
}

impl Region {
    pub fn all(g: GridDomain) -> Self {
        Region { ci0: 0, ci1: g.cells_x(), cj0: 0, cj1: g.cells_y() }
    }

    fn contains(&self, ci: usize, cj: usize) -> bool {
        ci >= self.ci0 && ci < self.ci1 && cj >= self.cj0 && cj < self.cj1
    }
}

/// `int_A f(dm/dx) dx + int_A f_inf(dm^s/d|m^s|) d|m^s|`; a face counts when
/// both its cells lie in `A`.
pub fn eval_convex_measure(f: &Integrand, m: &SymMeasure, region: Region) -> f64 {
    let g = m.ac.grid;
    let h2 = g.h() * g.h();
    let mut ac = 0.0;
    for cj in region.cj0..region.cj1.min(g.cells_y()) {
        for ci in region.ci0..region.ci1.min(g.cells_x()) {
            ac += f.eval(&m.ac.at(ci, cj));
        }
    }
    let mut sing = 0.0;
    for jf in &m.jumps {
        let (ci, cj) = jf.cell;
        let other = match jf.orientation {
            FaceOrientation::Vertical => (ci + 1, cj),
            FaceOrientation::Horizontal => (ci, cj + 1),
        };
        if region.contains(ci, cj) && region.contains(other.0, other.1) {
            let r = jf.jump.norm();
            if r > 0.0 {
                sing += f.recession_fn(&jf.jump) * jf.length;
            }
        }
    }
    ac * h2 + sing
}

/// Lattice boundary face with its outer normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFace {
    pub cell: (usize, usize),
    pub nodes: (usize, usize),
    pub normal: Vec2,
    pub midpoint: (f64, f64),
    pub length: f64,
}

/// Boundary faces in the order bottom, right, top, left.
pub fn boundary_faces(g: GridDomain) -> Vec<BoundaryFace> {
    let (cx, cy, h) = (g.cells_x(), g.cells_y(), g.h());
    let mut out = Vec::with_capacity(2 * (cx + cy));
    for ci in 0..cx {
        let (x, _) = g.cell_center(ci, 0);
        out.push(BoundaryFace { cell: (ci, 0), nodes: (g.node(ci, 0), g.node(ci + 1, 0)), normal: [0.0, -1.0], midpoint: (x, 0.0), length: h });
    }
    for cj in 0..cy {
        let (_, y) = g.cell_center(0, cj);
        let xr = cx as f64 * h;
        out.push(BoundaryFace { cell: (cx - 1, cj), nodes: (g.node(cx, cj), g.node(cx, cj + 1)), normal: [1.0, 0.0], midpoint: (xr, y), length: h });
    }
    for ci in 0..cx {
        let (x, _) = g.cell_center(ci, 0);
        let yt = cy as f64 * h;
        out.push(BoundaryFace { cell: (ci, cy - 1), nodes: (g.node(ci, cy), g.node(ci + 1, cy)), normal: [0.0, 1.0], midpoint: (x, yt), length: h });
    }
    for cj in 0..cy {
        let (_, y) = g.cell_center(0, cj);
        out.push(BoundaryFace { cell: (0, cj), nodes: (g.node(0, cj), g.node(0, cj + 1)), normal: [-1.0, 0.0], midpoint: (0.0, y), length: h });
    }
    out
}

/// Boundary datum: one value per boundary face, in [`boundary_faces`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub values: Vec<Vec2>,
}

impl BoundaryTrace {
    /// Mean of the two end nodes of each face.
    pub fn from_nodal(u0: &VectorField) -> Self {
        let values = boundary_faces(u0.grid)
            .iter()
            .map(|f| {
                let (a, b) = (u0.values[f.nodes.0], u0.values[f.nodes.1]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            })
            .collect();
        BoundaryTrace { values }
    }

    /// A function sampled at face midpoints.
    pub fn from_fn(g: GridDomain, f: impl Fn(f64, f64) -> Vec2) -> Self {
        BoundaryTrace { values: boundary_faces(g).iter().map(|b| f(b.midpoint.0, b.midpoint.1)).collect() }
    }
}

/// Parts of the relaxed functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxedValue {
    pub absolutely_continuous: f64,
    pub singular: f64,
    pub boundary: f64,
}

impl RelaxedValue {
    pub fn total(&self) -> f64 {
        self.absolutely_continuous + self.singular + self.boundary
    }
}

/// `sum f(e^a u) h^2 + sum_faces f_inf(jump) len + sum_bdry f_inf((u0 - u) ⊙ nu) len`.
pub fn relaxed_functional(u: &DiscreteBDField, u0: &BoundaryTrace, f: &Integrand) -> Result<RelaxedValue> {
    let faces = boundary_faces(u.grid);
    if u0.values.len() != faces.len() {
        return Err(Error::Shape { expected: faces.len(), got: u0.values.len() });
    }
    let m = bd_measure(u);
    let all = eval_convex_measure(f, &SymMeasure { ac: m.ac.clone(), jumps: Vec::new() }, Region::all(u.grid));
    let total = eval_convex_measure(f, &m, Region::all(u.grid));
    let mut boundary = 0.0;
    for (face, g0) in faces.iter().zip(&u0.values) {
        let d = vsub(*g0, u.trace(face));
        if vnorm(d) > 0.0 {
            boundary += f.recession_fn(&Sym2::sym_product(d, face.normal)) * face.length;
        }
    }
    Ok(RelaxedValue { absolutely_continuous: all, singular: total - all, boundary })
}

/// `int_{dOmega} f_inf(-R ⊙ nu)` with `R` sampled at face midpoints.
pub fn rigid_boundary_cost(g: GridDomain, r: Rigid, f: &Integrand) -> f64 {
    boundary_faces(g)
        .iter()
        .map(|face| {
            let v = r.at(face.midpoint.0, face.midpoint.1);
            f.recession_fn(&Sym2::sym_product([-v[0], -v[1]], face.normal)) * face.length
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryAttainment {
    /// Cost of the translations `e1`, `e2` and the rotation `(-y, x)`.
    pub per_basis: [f64; 3],
    /// Least cost over the basis and sampled unit combinations of it.
    pub margin: f64,
    /// `max_R |F[u + R] - F[u] - cost(R)|` over the basis.
    pub identity_defect: f64,
    pub pass: bool,
}

/// Checks that adding a nonzero rigid motion always costs a positive
/// boundary penalty, and that the cost enters additively when `u` attains
/// `u0`.
pub fn boundary_attainment_check(u: &DiscreteBDField, u0: &BoundaryTrace, f: &Integrand, n_dirs: usize) -> Result<BoundaryAttainment> {
    let g = u.grid;
    let basis = [Rigid { a: 1.0, b: 0.0, c: 0.0 }, Rigid { a: 0.0, b: 1.0, c: 0.0 }, Rigid { a: 0.0, b: 0.0, c: 1.0 }];
    let mut per_basis = [0.0; 3];
    let base = relaxed_functional(u, u0, f)?.total();
    let mut defect: f64 = 0.0;
    for (k, r) in basis.iter().enumerate() {
        per_basis[k] = rigid_boundary_cost(g, *r, f);
        let moved = relaxed_functional(&u.plus_rigid(*r), u0, f)?.total();
        defect = defect.max((moved - base - per_basis[k]).abs());
    }
    let mut margin = per_basis.iter().cloned().fold(f64::INFINITY, f64::min);
    // Fibonacci-sphere directions.
    let golden = core::f64::consts::PI * (3.0 - sqrt(5.0));
    for i in 0..n_dirs {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_dirs as f64;
        let rad = sqrt((1.0 - z * z).max(0.0));
        let th = golden * i as f64;
        let r = Rigid { a: rad * cos(th), b: rad * sin(th), c: z };
        margin = margin.min(rigid_boundary_cost(g, r, f));
    }
    let scale = 1.0 + base.abs();
    Ok(BoundaryAttainment { per_basis, margin, identity_defect: defect, pass: margin > 0.0 && defect <= 1e-10 * scale })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoGapReport {
    /// Relaxed functional of the last stabilised minimiser.
    pub relaxed: f64,
    /// `min_j F_j[v_j]`.
    pub inf_fj: f64,
    pub tol: f64,
    /// `relaxed <= inf_fj + tol`.
    pub holds: bool,
    /// `(j, F[v_j], F_j[v_j])` per solve.
    pub curve: Vec<(u64, f64, f64)>,
}

/// Compares the relaxed functional at the end of a viscosity sequence with
/// the infimum of the stabilised energies. `tol = c h`.
pub fn nogap_check(f: &Integrand, u0: &VectorField, solutions: &[ViscositySolution], c: f64) -> Result<NoGapReport> {
    let last = solutions.last().ok_or_else(|| Error::Invalid("empty sequence".into()))?;
    let trace = BoundaryTrace::from_nodal(u0);
    let relaxed = relaxed_functional(&DiscreteBDField::from_smooth(&last.v), &trace, f)?.total();
    let inf_fj = solutions.iter().map(|s| s.energy_fj).fold(f64::INFINITY, f64::min);
    let tol = c * u0.grid.h();
    let curve = solutions.iter().map(|s| (s.j, s.energy_f, s.energy_fj)).collect();
    Ok(NoGapReport { relaxed, inf_fj, tol, holds: relaxed <= inf_fj + tol, curve })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    /// `||e(u1) - e(u2)||_1`.
    pub eps_distance: f64,
    pub eps_scale: f64,
    /// L2 norm of the rigid part `R = Pi (u1 - u2)`.
    pub rigid_norm: f64,
    /// `||(u1 - u2) - R||_2`.
    pub rigid_residual: f64,
}

/// Compares two minimisers.
pub fn uniqueness_report(u1: &VectorField, u2: &VectorField) -> Result<UniquenessReport> {
    let basis = crate::rigid::rigid_basis(u1.grid);
    let d = u1.sub(u2);
    let (r, res) = crate::rigid::project_rigid(&basis, &d)?;
    Ok(UniquenessReport {
        eps_distance: sym_gradient(&d).l1_norm(),
        eps_scale: sym_gradient(u1).l1_norm(),
        rigid_norm: r.l2_norm(),
        rigid_residual: res.l2_norm(),
    })
}

/// Two unstabilised minimisations from different seeded starts.
pub fn uniqueness_check(f: &Integrand, u0: &VectorField, seeds: (u64, u64), opts: &crate::solver::SolverOptions) -> Result<UniquenessReport> {
    let a = crate::solver::minimize_plain(f, u0, &crate::solver::SolverOptions { seed: seeds.0, ..*opts })?;
    let b = crate::solver::minimize_plain(f, u0, &crate::solver::SolverOptions { seed: seeds.1, ..*opts })?;
    uniqueness_report(&a.v, &b.v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_matrices() {
        let g = GridDomain::unit_square(3).unwrap();
        let u = DiscreteBDField::from_cells(g, |x, _| if x > 0.5 { [1.0, 0.0] } else { [0.0, 0.0] });
        let m = bd_measure(&u);
        assert_eq!(m.jumps.len(), 2);
        for j in &m.jumps {
            assert_eq!(j.jump, Sym2::new(1.0, 0.0, 0.0));
        }
        assert!((m.total_variation() - 1.0).abs() < 1e-15);
        let v = DiscreteBDField::from_cells(g, |x, _| if x > 0.5 { [0.0, 1.0] } else { [0.0, 0.0] });
        let mv = bd_measure(&v);
        assert!((mv.jumps[0].jump.norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let c = DiscreteBDField::from_cells(g, |_, _| [3.0, -1.0]);
        assert_eq!(bd_measure(&c).total_variation(), 0.0);
    }

    #[test]
    fn translation_boundary_cost() {
        let g = GridDomain::unit_square(9).unwrap();
        for f in [Integrand::area(), Integrand::phi_mu(2.0).unwrap()] {
            let c = f.recession();
            let v = rigid_boundary_cost(g, Rigid { a: 1.0, b: 0.0, c: 0.0 }, &f);
            assert!((v - c * (2.0 + core::f64::consts::SQRT_2)).abs() < 1e-12);
        }
    }

    #[test]
    fn left_edge_penalty_and_homogeneity() {
        let g = GridDomain::unit_square(6).unwrap();
        let f = Integrand::area();
        let u = DiscreteBDField::from_cells(g, |_, _| [0.0, 0.0]);
        let t = BoundaryTrace::from_fn(g, |x, _| if x == 0.0 { [1.0, 0.0] } else { [0.0, 0.0] });
        let r = relaxed_functional(&u, &t, &f).unwrap();
        assert!((r.boundary - 1.0).abs() < 1e-12);
        let t2 = BoundaryTrace { values: t.values.iter().map(|v| [2.0 * v[0], 2.0 * v[1]]).collect() };
        let r2 = relaxed_functional(&u, &t2, &f).unwrap();
        assert_eq!(r2.boundary, 2.0 * r.boundary);
    }
}
