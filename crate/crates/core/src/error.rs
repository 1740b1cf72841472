//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |H_ij - conj(H_ji)| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("operator must be square with dim >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("not a test operator: spectrum [{min:.3e}, {max:.3e}] leaves [0, 1]")]
    InvalidTestOperator { min: f64, max: f64 },

    #[error("logarithm undefined: smallest eigenvalue {min_eigenvalue:.3e} is negative")]
    LogDomain { min_eigenvalue: f64 },

    #[error("resulting dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("Kraus set is not trace preserving: max |sum K^dag K - 1| = {error:.3e}")]
    IncompleteKraus { error: f64 },

    #[error("observables together with the identity are not linearly independent (Gram condition number {condition:.3e})")]
    DegenerateObservables { condition: f64 },

    #[error("target expectation values are infeasible: |lambda| reached {max_abs_lambda:.3e} after {iterations} Newton steps")]
    Infeasible { max_abs_lambda: f64, iterations: usize },

    #[error("MaxEnt fit stalled at residual {residual:.3e} after {iterations} Newton steps (near_extremal = {near_extremal})")]
    NotConverged {
        residual: f64,
        iterations: usize,
        near_extremal: bool,
    },

    #[error("covariance matrix is ill-conditioned: condition number {condition:.3e}")]
    IllConditioned { condition: f64 },

    #[error("epsilon = {0} outside (0, 1]")]
    InvalidEpsilon(f64),

    #[error("gamma = {0} outside [0, 1): extremal expectation values are excluded")]
    InvalidGamma(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
