//! Chart-based tensor calculus: symmetric tensors, connections, curvature
//! and the symmetric Cartan calculus.
//!
//! Conventions (see `docs/CONVENTIONS.md`): `⊙` is the unnormalized
//! shuffle sum, so `X⊙X = 2 X⊗X`; `ι_α` contracts the first slot and is a
//! degree −1 derivation of `⊙`; `Γ^k_{ij}` is defined by
//! `∇_{∂i}∂j = Γ^k_{ij}∂k`.

mod cartan;
mod chart;
mod connection;
mod metric;
mod tensor;

use thiserror::Error;

use crate::expr::EvalError;

pub use cartan::{
    anticommutative_schouten, directional, is_killing, lie_bracket, pairing, schouten,
    symmetric_bracket, symmetric_derivative, symmetric_lie_derivative,
};
pub use chart::Chart;
pub use connection::{Connection, CovariantDerivative, CurvatureField, TorsionFree};
pub use metric::{determinant, levi_civita, levi_civita_with_inverse};
pub use tensor::{Lower, SymField, SymFormField, SymTensorField, Upper, Variance};

pub(crate) use tensor::sorted_indices;

/// Largest supported tensor degree.
pub const MAX_DEGREE: usize = 6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error("degree {degree} exceeds the supported cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("{0}")]
    InvalidDegree(String),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("index {index:?} out of range for dimension {dim}, degree {degree}")]
    IndexOutOfRange {
        index: Vec<usize>,
        dim: usize,
        degree: usize,
    },
    #[error("connection has torsion (max normalized residual {residual:e})")]
    Torsion { residual: f64 },
    #[error("matrix field is degenerate at {point:?}")]
    Degenerate { point: Vec<f64> },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
