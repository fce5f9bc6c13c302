//! Numerical laboratory for convex variational problems of linear growth in
//! the symmetric gradient, on uniform 2D lattices.
//!
//! The crate is `no_std` with `alloc`. Everything that touches files, the
//! command line or a sparse LP solver lives in the `bdvarmin` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod duality;
pub mod error;
pub mod fft;
pub mod grid;
pub mod integrands;
pub mod linalg;
pub mod lp;
pub mod math;
pub mod quadrature;
pub mod relaxation;
pub mod rigid;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use grid::{GridDomain, Mat2, Sym2, SymTensorField, TensorField, Vec2, VectorField};
pub use integrands::Integrand;
