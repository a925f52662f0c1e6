//! Patterson-Walker geometry of `T*M`: the split-signature metric of a
//! torsion-free connection, its bracket, the vertical lift of symmetric
//! multivectors, and fixed-step RK4 dynamics with monitors.
//!
//! Phase coordinates are `(x¹…xⁿ, p₁…pₙ)`; a [`PhaseField`] is an
//! expression in `2n` variables with the momenta at indices `n..2n`.

mod dynamics;
mod monitor;
mod phase;
mod trajectory;

use thiserror::Error;

use crate::expr::EvalError;
use crate::geometry::GeometryError;

pub use dynamics::{integrate_geodesic, integrate_pw, rk4_step, run_newtonian};
pub use monitor::{
    check_locally_geodesically_invariant, monitor_geodesic_equation, monitor_geodesic_residual,
    monitor_momentum_on_velocity, monitor_parallel_transport, monitor_speed_square,
    GeodesicResidual, InvarianceReport,
};
pub use phase::{
    canonical_bracket, hamiltonian_vector_field, pw_bracket, pw_gradient, pw_metric_matrix,
    vertical_lift, CotangentState, PhaseField, PhaseVector,
};
pub use trajectory::{Channel, GeodesicTrajectory, PhaseState, TangentState, Trajectory};

#[derive(Debug, Error)]
pub enum PwError {
    #[error("phase fields live over different base charts")]
    ChartMismatch,
    #[error("variable {index} is out of range for {arity} phase coordinates")]
    VarOutOfRange { index: usize, arity: usize },
    #[error("expected dimension {expected}, got {got}")]
    StateDimension { expected: usize, got: usize },
    #[error("state has non-finite entries")]
    NonFinite,
    #[error("{0}")]
    InvalidStep(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("need at least {needed} steps for central differences, got {steps}")]
    TooFewSteps { steps: usize, needed: usize },
    #[error("state became non-finite at step {step}")]
    BlowUp {
        step: usize,
        partial: Box<Trajectory>,
    },
    #[error("geodesic state became non-finite at step {step}")]
    GeodesicBlowUp {
        step: usize,
        partial: Box<GeodesicTrajectory>,
    },
    #[error("evaluation failed at step {step}: {source}")]
    StepEval { step: usize, source: EvalError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
