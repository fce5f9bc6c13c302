use alloc::boxed::Box;
use alloc::string::String;

use crate::grid::VectorField;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid too small: {nx}x{ny} nodes (need at least 2x2)")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("invalid grid spacing {0}")]
    BadSpacing(f64),
    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("shift of {steps} steps along axis {axis} leaves no valid nodes")]
    ShiftTooLarge { axis: usize, steps: isize },
    #[error("parameter `{name}` = {value} outside {range}")]
    Param { name: &'static str, value: f64, range: &'static str },
    #[error("unknown integrand `{0}`")]
    UnknownIntegrand(String),
    #[error("matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("solver did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64, last: Option<Box<VectorField>> },
    #[error("rigid input: symmetric gradient vanishes identically")]
    RigidInput,
    #[error("dual candidate infeasible: {0}")]
    Infeasible(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
