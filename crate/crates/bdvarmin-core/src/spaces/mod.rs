//! Fractional seminorms, maximal operators, embedding experiments and the
//! diagnostic energies built on them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridDomain, VectorField};
use crate::math::sqrt;

mod embedding;
mod energies;
mod maximal;
mod ornstein;
mod seminorms;
mod smith;

pub use embedding::*;
pub use energies::*;
pub use maximal::*;
pub use ornstein::*;
pub use seminorms::*;
pub use smith::*;

/// Samples on a 1D lattice (`ny == 1`) or a 2D grid, `ncomp` components per
/// node. Node `(i, j)` sits at `(i h, j h)` and carries
/// `values[(i + j nx) ncomp ..][..ncomp]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub ncomp: usize,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(nx: usize, ny: usize, h: f64, ncomp: usize, values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 1 || ncomp == 0 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::BadSpacing(h));
        }
        if values.len() != nx * ny * ncomp {
            return Err(Error::Shape { expected: nx * ny * ncomp, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite sample".into()));
        }
        Ok(SampledFunction { nx, ny, h, ncomp, values })
    }

    /// Scalar samples `f(x_i)`, `x_i = x0 + i h`.
    pub fn line(n: usize, x0: f64, h: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(n, 1, h, 1, (0..n).map(|i| f(x0 + i as f64 * h)).collect())
    }

    pub fn scalar_2d(grid: GridDomain, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.num_nodes());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let (x, y) = grid.node_coords(i, j);
                v.push(f(x, y));
            }
        }
        SampledFunction { nx: grid.nx(), ny: grid.ny(), h: grid.h(), ncomp: 1, values: v }
    }

    pub fn from_vector_field(u: &VectorField) -> Self {
        let g = u.grid;
        let values = u.values.iter().flat_map(|v| [v[0], v[1]]).collect();
        SampledFunction { nx: g.nx(), ny: g.ny(), h: g.h(), ncomp: 2, values }
    }

    /// Spatial dimension: 1 for a line, 2 otherwise.
    pub fn dim(&self) -> usize {
        if self.ny == 1 {
            1
        } else {
            2
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn at(&self, node: usize) -> &[f64] {
        &self.values[node * self.ncomp..(node + 1) * self.ncomp]
    }

    /// Euclidean distance of the samples at two nodes.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        if self.ncomp == 1 {
            return (self.values[a] - self.values[b]).abs();
        }
        let (x, y) = (self.at(a), self.at(b));
        sqrt(x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum())
    }

    pub fn norm_at(&self, node: usize) -> f64 {
        sqrt(self.at(node).iter().map(|v| v * v).sum())
    }

    /// Volume element `h^n`.
    pub fn cell_volume(&self) -> f64 {
        if self.dim() == 1 {
            self.h
        } else {
            self.h * self.h
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        SampledFunction { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// Scalar function with the given per-node values on the same lattice.
    pub fn scalar_like(&self, values: Vec<f64>) -> Self {
        SampledFunction { nx: self.nx, ny: self.ny, h: self.h, ncomp: 1, values }
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.num_nodes()).map(|n| self.norm_at(n)).fold(0.0, f64::max)
    }
}

/// A named seminorm value and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormResult {
    pub name: String,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub value: f64,
    /// Nodes per axis.
    pub resolution: usize,
}
