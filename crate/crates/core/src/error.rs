use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation was called outside of its precondition.
    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    /// Characteristic length at or above the admissible bound `2 E Gf / sy^2`.
    #[error("length scale {length} mm is not below the admissible bound {bound} mm")]
    LengthScale { length: f64, bound: f64 },

    #[error("plane-stress iteration did not converge after {iterations} iterations (|s33| = {residual:e})")]
    PlaneStress { iterations: usize, residual: f64 },

    #[error("tangent evaluation failed: {0}")]
    Tangent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
