use thiserror::Error;

use crate::incidence::ClosedPathCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction {index} is the zero vector")]
    ZeroDirection { index: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("at least one {0} is required")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("bolt directions are parallel")]
    ParallelDirections,

    #[error("bolt has {available} points, {requested} requested")]
    BoltTooShort { requested: usize, available: usize },

    #[error("bolt generator failed at step {step}: {reason}")]
    GeneratorStalled { step: usize, reason: String },

    #[error("configuration contains a closed path; density precondition fails")]
    ClosedPath(Box<ClosedPathCertificate>),

    #[error("polynomial encoder budget exhausted; best sup-norm error {best_error:e}")]
    EncoderBudget { best_error: f64 },

    #[error("network fitter budget exhausted; best level error {best_error:e}")]
    FitBudget { best_error: f64 },

    #[error("activation behaves like a polynomial of degree {degree}")]
    PolynomialActivation { degree: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
