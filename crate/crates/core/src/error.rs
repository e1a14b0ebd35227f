use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Numerical failures (`NoConvergence`, `DegenerateOrbitals`) are distinguished
/// from usage errors so callers can map them to different exit paths.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("precision must be at least one decimal digit")]
    InvalidPrecision,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular at working precision (pivot {pivot} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("{mode} QR iteration did not converge after {iterations} iterations ({context})")]
    NoConvergence { mode: &'static str, iterations: usize, context: String },

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("condition number is infinite at working precision")]
    InfiniteCondition,

    #[error("left/right eigenvector overlap vanishes for eigenvalue {index}")]
    VanishingOverlap { index: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("no closed form available: {0}")]
    NoClosedForm(String),

    #[error("gamma = delta is the exceptional boundary of the symplectic model")]
    ExceptionalBoundary,

    #[error("orbital collapse at t = {t}: R[{column},{column}] below working precision")]
    DegenerateOrbitals { t: f64, column: usize },

    #[error("series covers {available} time units, window needs {required}")]
    InsufficientWindow { available: f64, required: f64 },

    #[error("Fock dimension for L = {sites} exceeds the guard of {max} sites")]
    DimensionTooLarge { sites: usize, max: usize },

    #[error("condition-number fit failed: {0}")]
    FitFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DegenerateOrbitals { .. }
                | Error::SingularMatrix { .. }
                | Error::InfiniteCondition
                | Error::VanishingOverlap { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
