//! Uniform rectangular lattices, nodal and cell fields, and the discrete
//! symmetric gradient / divergence pair.
//!
//! Nodes are indexed `(i, j)` with `i` along x; node `(i, j)` sits at
//! `(i h, j h)`. Cell `(ci, cj)` has corners `(ci, cj)` .. `(ci + 1, cj + 1)`.
//! Cell derivatives are averaged forward differences, i.e. the gradient of the
//! bilinear interpolant at the cell centre.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

pub type Vec2 = [f64; 2];

#[inline]
pub fn vnorm(v: Vec2) -> f64 {
    crate::math::hypot(v[0], v[1])
}

#[inline]
pub fn vsub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn vadd(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn vscale(a: Vec2, s: f64) -> Vec2 {
    [a[0] * s, a[1] * s]
}

/// Symmetric 2x2 matrix stored as its three independent entries.
///
/// The inner product is the Frobenius one, `A:B = a11 b11 + a22 b22 + 2 a12 b12`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, yy: 0.0, xy: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, yy: 1.0, xy: 0.0 };

    pub const fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Sym2 { xx, yy, xy }
    }

    #[inline]
    pub fn dot(&self, o: &Sym2) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        sqrt(self.norm_sq())
    }

    /// Entrywise l1 norm `|a11| + |a22| + 2|a12|`.
    pub fn entry_l1(&self) -> f64 {
        abs(self.xx) + abs(self.yy) + 2.0 * abs(self.xy)
    }

    /// Mandel coordinates `(a11, a22, sqrt2 a12)`; isometric to R^3.
    #[inline]
    pub fn mandel(&self) -> [f64; 3] {
        [self.xx, self.yy, core::f64::consts::SQRT_2 * self.xy]
    }

    #[inline]
    pub fn from_mandel(m: [f64; 3]) -> Self {
        Sym2::new(m[0], m[1], m[2] * core::f64::consts::FRAC_1_SQRT_2)
    }

    /// Symmetric tensor product `a ⊙ b = (a⊗b + b⊗a)/2`.
    pub fn sym_product(a: Vec2, b: Vec2) -> Self {
        Sym2::new(a[0] * b[0], a[1] * b[1], 0.5 * (a[0] * b[1] + a[1] * b[0]))
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.yy.is_finite() && self.xy.is_finite()
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.yy + o.yy, self.xy + o.xy)
    }
}
impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx - o.xx, self.yy - o.yy, self.xy - o.xy)
    }
}
impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.yy, -self.xy)
    }
}
impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.xx * s, self.yy * s, self.xy * s)
    }
}
impl AddAssign for Sym2 {
    fn add_assign(&mut self, o: Sym2) {
        *self = *self + o;
    }
}
impl SubAssign for Sym2 {
    fn sub_assign(&mut self, o: Sym2) {
        *self = *self - o;
    }
}

/// Full 2x2 matrix; row `k` is the gradient of component `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn sym(&self) -> Sym2 {
        let m = &self.0;
        Sym2::new(m[0][0], m[1][1], 0.5 * (m[0][1] + m[1][0]))
    }

    /// Off-diagonal entry of the skew part, `(m01 - m10)/2`.
    pub fn skew(&self) -> f64 {
        0.5 * (self.0[0][1] - self.0[1][0])
    }

    pub fn norm(&self) -> f64 {
        let m = &self.0;
        sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1])
    }

    pub fn entry_l1(&self) -> f64 {
        let m = &self.0;
        abs(m[0][0]) + abs(m[0][1]) + abs(m[1][0]) + abs(m[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary,
}

/// Uniform lattice on `[0, (nx-1)h] x [0, (ny-1)h]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDomain {
    nx: usize,
    ny: usize,
    h: f64,
}

impl GridDomain {
    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadSpacing(h));
        }
        Ok(GridDomain { nx, ny, h })
    }

    /// `n x n` nodes covering the unit square.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0 / (n.max(2) - 1) as f64)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }
    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }
    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.nx * self.ny
    }
    #[inline]
    pub fn cells_x(&self) -> usize {
        self.nx - 1
    }
    #[inline]
    pub fn cells_y(&self) -> usize {
        self.ny - 1
    }
    #[inline]
    pub fn num_cells(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i + j * self.nx
    }
    #[inline]
    pub fn cell(&self, ci: usize, cj: usize) -> usize {
        ci + cj * (self.nx - 1)
    }
    #[inline]
    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.h, j as f64 * self.h)
    }
    #[inline]
    pub fn cell_center(&self, ci: usize, cj: usize) -> (f64, f64) {
        ((ci as f64 + 0.5) * self.h, (cj as f64 + 0.5) * self.h)
    }
    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub fn kind(&self, i: usize, j: usize) -> NodeKind {
        if self.is_boundary(i, j) {
            NodeKind::Boundary
        } else {
            NodeKind::Interior
        }
    }

    pub fn boundary_mask(&self) -> Vec<NodeKind> {
        let mut m = Vec::with_capacity(self.num_nodes());
        for j in 0..self.ny {
            for i in 0..self.nx {
                m.push(self.kind(i, j));
            }
        }
        m
    }

    /// Area covered by the cells.
    pub fn area(&self) -> f64 {
        self.num_cells() as f64 * self.h * self.h
    }

    /// Node indices of cell corners in the order (0,0), (1,0), (0,1), (1,1).
    #[inline]
    pub fn cell_nodes(&self, ci: usize, cj: usize) -> [usize; 4] {
        let n = self.node(ci, cj);
        [n, n + 1, n + self.nx, n + self.nx + 1]
    }

    pub fn same_shape(&self, o: &GridDomain) -> bool {
        self.nx == o.nx && self.ny == o.ny
    }
}

/// Stencil weights of the cell x- and y-derivative on the four corners,
/// corner order as in [`GridDomain::cell_nodes`], before dividing by `h`.
pub(crate) const DX: [f64; 4] = [-0.5, 0.5, -0.5, 0.5];
pub(crate) const DY: [f64; 4] = [-0.5, -0.5, 0.5, 0.5];

/// Map from the 8 local dofs `[u1(c0), u2(c0), u1(c1), ...]` of a cell to the
/// Mandel coordinates of its symmetric gradient.
pub(crate) fn cell_strain_matrix(h: f64) -> [[f64; 8]; 3] {
    let mut b = [[0.0; 8]; 3];
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for a in 0..4 {
        b[0][2 * a] = DX[a] / h;
        b[1][2 * a + 1] = DY[a] / h;
        b[2][2 * a] = r * DY[a] / h;
        b[2][2 * a + 1] = r * DX[a] / h;
    }
    b
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: GridDomain,
    pub values: Vec<Vec2>,
}

impl VectorField {
    pub fn zeros(grid: GridDomain) -> Self {
        VectorField { grid, values: vec![[0.0; 2]; grid.num_nodes()] }
    }

    pub fn new(grid: GridDomain, values: Vec<Vec2>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::Shape { expected: grid.num_nodes(), got: values.len() });
        }
        if values.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::Invalid("non-finite nodal value".into()));
        }
        Ok(VectorField { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: GridDomain, f: impl Fn(f64, f64) -> Vec2) -> Self {
        let mut values = Vec::with_capacity(grid.num_nodes());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.node_coords(i, j);
                values.push(f(x, y));
            }
        }
        VectorField { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Vec2 {
        self.values[self.grid.node(i, j)]
    }

    /// Discrete L2 inner product with node weights `h^2`.
    pub fn dot(&self, o: &VectorField) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        self.values.iter().zip(&o.values).map(|(a, b)| a[0] * b[0] + a[1] * b[1]).sum::<f64>() * h2
    }

    pub fn l2_norm(&self) -> f64 {
        sqrt(self.dot(self))
    }

    /// `(sum |u|^p h^2)^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        let s: f64 = self.values.iter().map(|v| crate::math::powf(vnorm(*v), p)).sum();
        crate::math::powf(s * h2, 1.0 / p)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| vnorm(*v)).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        for (v, w) in self.values.iter_mut().zip(&x.values) {
            v[0] += a * w[0];
            v[1] += a * w[1];
        }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| vsub(*a, *b)).collect();
        VectorField { grid: self.grid, values }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| vadd(*a, *b)).collect();
        VectorField { grid: self.grid, values }
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        VectorField { grid: self.grid, values: self.values.iter().map(|v| vscale(*v, s)).collect() }
    }

    /// Max deviation from `o` on boundary nodes.
    pub fn boundary_mismatch(&self, o: &VectorField) -> f64 {
        let g = self.grid;
        let mut m: f64 = 0.0;
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                if g.is_boundary(i, j) {
                    m = m.max(vnorm(vsub(self.at(i, j), o.at(i, j))));
                }
            }
        }
        m
    }
}

/// Cell-centred symmetric tensor field, `(nx-1) x (ny-1)` values.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField {
    pub grid: GridDomain,
    pub values: Vec<Sym2>,
}

impl SymTensorField {
    pub fn zeros(grid: GridDomain) -> Self {
        Self::constant(grid, Sym2::ZERO)
    }

    pub fn constant(grid: GridDomain, s: Sym2) -> Self {
        SymTensorField { grid, values: vec![s; grid.num_cells()] }
    }

    pub fn new(grid: GridDomain, values: Vec<Sym2>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::Shape { expected: grid.num_cells(), got: values.len() });
        }
        Ok(SymTensorField { grid, values })
    }

    pub fn from_fn(grid: GridDomain, f: impl Fn(f64, f64) -> Sym2) -> Self {
        let mut values = Vec::with_capacity(grid.num_cells());
        for cj in 0..grid.cells_y() {
            for ci in 0..grid.cells_x() {
                let (x, y) = grid.cell_center(ci, cj);
                values.push(f(x, y));
            }
        }
        SymTensorField { grid, values }
    }

    #[inline]
    pub fn at(&self, ci: usize, cj: usize) -> Sym2 {
        self.values[self.grid.cell(ci, cj)]
    }

    /// Frobenius L2 inner product with cell weights `h^2`.
    pub fn dot(&self, o: &SymTensorField) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        self.values.iter().zip(&o.values).map(|(a, b)| a.dot(b)).sum::<f64>() * h2
    }

    pub fn l2_norm(&self) -> f64 {
        sqrt(self.dot(self))
    }

    /// `sum |s| h^2` with the Frobenius norm.
    pub fn l1_norm(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        self.values.iter().map(|s| s.norm()).sum::<f64>() * h2
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, o: &SymTensorField) -> SymTensorField {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| *a - *b).collect();
        SymTensorField { grid: self.grid, values }
    }

    pub fn add(&self, o: &SymTensorField) -> SymTensorField {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| *a + *b).collect();
        SymTensorField { grid: self.grid, values }
    }

    pub fn scaled(&self, s: f64) -> SymTensorField {
        SymTensorField { grid: self.grid, values: self.values.iter().map(|v| *v * s).collect() }
    }

    pub fn map(&self, f: impl Fn(Sym2) -> Sym2) -> SymTensorField {
        SymTensorField { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect() }
    }
}

/// Cell-centred full gradient field.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    pub grid: GridDomain,
    pub values: Vec<Mat2>,
}

impl TensorField {
    pub fn sym(&self) -> SymTensorField {
        SymTensorField { grid: self.grid, values: self.values.iter().map(Mat2::sym).collect() }
    }

    pub fn at(&self, ci: usize, cj: usize) -> Mat2 {
        self.values[self.grid.cell(ci, cj)]
    }
}

#[inline]
pub(crate) fn cell_gradient(u: &VectorField, ci: usize, cj: usize) -> Mat2 {
    let g = &u.grid;
    let nodes = g.cell_nodes(ci, cj);
    let inv_h = 1.0 / g.h();
    let mut m = [[0.0; 2]; 2];
    for (a, &n) in nodes.iter().enumerate() {
        let v = u.values[n];
        for k in 0..2 {
            m[k][0] += DX[a] * v[k];
            m[k][1] += DY[a] * v[k];
        }
    }
    for row in m.iter_mut() {
        row[0] *= inv_h;
        row[1] *= inv_h;
    }
    Mat2(m)
}

pub fn full_gradient(u: &VectorField) -> TensorField {
    let g = u.grid;
    let mut values = Vec::with_capacity(g.num_cells());
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            values.push(cell_gradient(u, ci, cj));
        }
    }
    TensorField { grid: g, values }
}

pub fn sym_gradient(u: &VectorField) -> SymTensorField {
    let g = u.grid;
    let mut values = Vec::with_capacity(g.num_cells());
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            values.push(cell_gradient(u, ci, cj).sym());
        }
    }
    SymTensorField { grid: g, values }
}

/// Nodal divergence, defined as minus the adjoint of [`sym_gradient`]:
/// `sum_cells <s, e(phi)> h^2 = - sum_nodes <div s, phi> h^2` for every
/// nodal `phi`. Values at boundary nodes are the adjoint's boundary rows.
pub fn divergence(s: &SymTensorField) -> VectorField {
    let g = s.grid;
    let inv_h = 1.0 / g.h();
    let mut out = vec![[0.0; 2]; g.num_nodes()];
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let t = s.at(ci, cj);
            let nodes = g.cell_nodes(ci, cj);
            for (a, &n) in nodes.iter().enumerate() {
                let (cx, cy) = (DX[a] * inv_h, DY[a] * inv_h);
                out[n][0] -= t.xx * cx + t.xy * cy;
                out[n][1] -= t.xy * cx + t.yy * cy;
            }
        }
    }
    VectorField { grid: g, values: out }
}

/// L2 norm of `div s` over interior nodes.
pub fn interior_div_norm(s: &SymTensorField) -> f64 {
    let d = divergence(s);
    let g = s.grid;
    let mut acc = 0.0;
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            let v = d.at(i, j);
            acc += v[0] * v[0] + v[1] * v[1];
        }
    }
    sqrt(acc) * g.h()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffVariant {
    /// `u(x + k h e_s) - u(x)`
    Forward,
    /// `u(x) - u(x - k h e_s)`
    Backward,
}

/// Values of a finite difference on the sub-lattice where it is defined.
/// `values[i + j * nx]` belongs to parent index `(i0 + i, j0 + j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shifted<T> {
    pub i0: usize,
    pub j0: usize,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
}

impl<T: Copy> Shifted<T> {
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i + j * self.nx]
    }
}

impl Shifted<Vec2> {
    /// Reinterprets a shifted nodal field as a field on its own sub-grid.
    pub fn into_field(self, h: f64) -> Result<VectorField> {
        let g = GridDomain::new(self.nx, self.ny, h)?;
        VectorField::new(g, self.values)
    }
}

pub(crate) fn shift_diff<T: Copy>(
    data: &[T],
    nx: usize,
    ny: usize,
    axis: usize,
    steps: isize,
    variant: DiffVariant,
    sub: impl Fn(T, T) -> T,
) -> Result<Shifted<T>> {
    let k = steps.unsigned_abs();
    let extent = if axis == 0 { nx } else { ny };
    if axis > 1 || k >= extent {
        return Err(Error::ShiftTooLarge { axis, steps });
    }
    // Offset of the "other" point relative to the output point.
    let off: isize = match variant {
        DiffVariant::Forward => steps,
        DiffVariant::Backward => -steps,
    };
    let (lo, n_out) = if off >= 0 { (0usize, extent - k) } else { (k, extent - k) };
    let (i0, j0, onx, ony) = if axis == 0 { (lo, 0, n_out, ny) } else { (0, lo, nx, n_out) };
    let mut values = Vec::with_capacity(onx * ony);
    for j in 0..ony {
        for i in 0..onx {
            let (pi, pj) = (i0 + i, j0 + j);
            let (qi, qj) = if axis == 0 {
                ((pi as isize + off) as usize, pj)
            } else {
                (pi, (pj as isize + off) as usize)
            };
            let p = data[pi + pj * nx];
            let q = data[qi + qj * nx];
            values.push(match variant {
                DiffVariant::Forward => sub(q, p),
                DiffVariant::Backward => sub(p, q),
            });
        }
    }
    Ok(Shifted { i0, j0, nx: onx, ny: ony, values })
}

/// Finite difference `tau_{s,kh}` of a nodal vector field along `axis`.
pub fn translate_diff(u: &VectorField, axis: usize, steps: isize, variant: DiffVariant) -> Result<Shifted<Vec2>> {
    let g = u.grid;
    shift_diff(&u.values, g.nx(), g.ny(), axis, steps, variant, vsub)
}

/// Difference quotient `Delta_{s,kh} = tau_{s,kh} / (|k| h)`.
pub fn delta_diff(u: &VectorField, axis: usize, steps: isize, variant: DiffVariant) -> Result<Shifted<Vec2>> {
    let mut d = translate_diff(u, axis, steps, variant)?;
    let s = 1.0 / (steps.unsigned_abs() as f64 * u.grid.h());
    for v in d.values.iter_mut() {
        *v = vscale(*v, s);
    }
    Ok(d)
}

/// Finite difference of a cell field along `axis`.
pub fn translate_diff_cells(s: &SymTensorField, axis: usize, steps: isize, variant: DiffVariant) -> Result<Shifted<Sym2>> {
    let g = s.grid;
    shift_diff(&s.values, g.cells_x(), g.cells_y(), axis, steps, variant, |a, b| a - b)
}
