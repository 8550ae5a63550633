use thiserror::Error;

/// Errors raised by the moment-space, ensemble and Schur routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix is singular or not positive definite")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square or has non-finite entries")]
    InvalidMatrix,
    #[error("matrix has full rank deficiency (smallest singular value {smallest:e})")]
    RankDeficient { smallest: f64 },
    #[error("moment vector is not in the interior of the moment space (level {level})")]
    NotInterior { level: usize },
    #[error("canonical moment {index} is not strictly inside the admissible set")]
    NotInInterior { index: usize },
    #[error("matrix {index} is not a strict contraction")]
    NotStrictContraction { index: usize },
    #[error("matrix is not a contraction")]
    NotContraction,
    #[error("measure weights do not sum to the identity (deviation {deviation:e})")]
    NotNormalized { deviation: f64 },
    #[error("quadrature grid has {nodes} nodes, at least {min} required")]
    GridTooCoarse { nodes: usize, min: usize },
    #[error("invalid shape parameter: {0}")]
    BadShape(String),
    #[error("evaluation point |z| = {modulus} is too close to the unit circle")]
    TooCloseToBoundary { modulus: f64 },
    #[error("matrix is not invertible")]
    NonInvertible,
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
