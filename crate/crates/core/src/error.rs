use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}x{expected}, found {found}")]
    DimensionMismatch { expected: usize, found: String },

    #[error("matrix must be square and non-empty, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian within tolerance: asymmetry {asymmetry:.3e} exceeds {allowed:.3e}")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("not positive definite: smallest eigenvalue {min_eigenvalue:.6e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("preset requires Hermitian A and B")]
    PresetRequiresHermitian,

    #[error("contraction factor {0} is outside (0, 1)")]
    DeltaOutOfRange(f64),

    #[error("sufficient conditions are not satisfied")]
    ConditionsNotSatisfied,

    #[error("singular operator: reciprocal condition estimate {rcond:.3e}")]
    SingularOperator { rcond: f64 },

    #[error("direct solve refuses N = {n} (limit {limit})")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("{field}: {message}")]
    Format { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
