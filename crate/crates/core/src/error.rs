use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model description is malformed (bad variance, order mismatch, non-finite coefficient).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Input data contains NaN or infinite values.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// The inverse spectrum dips below the admissible floor, so `1/g` is unbounded.
    #[error("g reaches {inf_g:e} at (r = {r}, omega = {omega}), below the floor {g_floor:e}")]
    BelowFloor {
        inf_g: f64,
        g_floor: f64,
        r: f64,
        omega: f64,
    },

    /// A target distortion exceeds the largest attainable distortion.
    #[error("target distortion {d_target} is outside (0, {d_max}]")]
    DistortionOutOfRange { d_target: f64, d_max: f64 },

    /// Quadrature refinement ran out of budget before the estimates settled.
    #[error("quadrature did not converge after {refinements} refinements (last {last:?}, previous {previous:?})")]
    Convergence {
        refinements: usize,
        last: Vec<f64>,
        previous: Vec<f64>,
    },

    /// The implicit QL iteration failed to deflate.
    #[error("eigenvalue iteration did not converge at index {0}")]
    EigenConvergence(usize),

    /// Malformed text input (CSV, band files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
