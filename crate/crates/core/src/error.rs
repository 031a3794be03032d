use thiserror::Error;

/// Errors produced by the phase-space, sampling and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with even dimension, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("symmetry invariant violated: max |G - G^T| = {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("covariance matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPositiveDefinite { min_eigenvalue: f64 },

    #[error("uncertainty relation violated: smallest symplectic eigenvalue {min_nu} < 1/2")]
    NotPhysical { min_nu: f64 },

    #[error("matrix is not symplectic (max |S Omega S^T - Omega| = {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("matrix is not orthogonal (max |S^T S - I| = {residual:e})")]
    NotOrthogonal { residual: f64 },

    #[error("matrix is not unitary (max |U^H U - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("mode count {requested} out of range 1..={available}")]
    BadModeCount { requested: usize, available: usize },

    #[error("Weingarten function needs dimension >= 2, got {0}")]
    BadDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("energy constraint set is empty: 4E = {four_e} < 2n = {two_n}")]
    EmptyConstraintSet { four_e: f64, two_n: f64 },

    #[error(
        "rejection sampling found no point of the energy ball after {attempts} draws \
         (acceptance rate below 1e-6); use a deterministic z profile instead"
    )]
    RejectionTimeout { attempts: u64 },

    #[error("empty input")]
    EmptyInput,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("sample {index} failed: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Sample { source, .. } => source.exit_code(),
            Error::NumericalFailure(_) | Error::RejectionTimeout { .. } => 3,
            Error::InvariantViolated(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
