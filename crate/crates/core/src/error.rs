use thiserror::Error;

use crate::model::Transition;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("{count} Liouvillian eigenvalues lie within {tol:e} of zero; steady state is not unique")]
    DegenerateNullSpace { count: usize, tol: f64 },

    #[error("no Liouvillian eigenvalue within {tol:e} of zero (nearest has modulus {nearest:e})")]
    NoStationaryState { nearest: f64, tol: f64 },

    #[error("null vector has trace {trace:e}; cannot normalize to a density operator")]
    NonPhysicalState { trace: f64 },

    #[error("right-eigenvector matrix condition number {condition:e} exceeds {limit:e}")]
    IllConditionedEigenbasis { condition: f64, limit: f64 },

    #[error("{transition} transition has steady-state population {population:e}; correlation normalization undefined")]
    UnpopulatedTransition {
        transition: Transition,
        population: f64,
    },

    #[error("steady-state quadrature mean {mean:e} at phi = {phi} vanishes; amplitude-intensity correlation undefined")]
    DegenerateQuadratureMean { phi: f64, mean: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("correlation has not decayed at the quadrature cutoff: |h - 1| = {residual:e}")]
    TailNotConverged { residual: f64 },

    #[error("series kind {found} is not accepted here (expected {expected})")]
    WrongSeriesKind {
        found: &'static str,
        expected: &'static str,
    },

    #[error("series mismatch: {0}")]
    GridMismatch(String),

    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
