use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input (shape, label, parameter range).
    #[error("invalid input: {0}")]
    Input(String),

    /// Operand dimensions that must agree do not.
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    /// A matrix that should be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A matrix that should be positive semidefinite has a negative eigenvalue.
    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e} below -{tolerance:.1e}")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    /// A state does not have unit trace.
    #[error("trace {trace} differs from 1 by more than {tolerance:.1e}")]
    Trace { trace: f64, tolerance: f64 },

    /// The requested computation exceeds the configured resource guard.
    #[error("resource guard: {0}")]
    Resource(String),

    /// An operation's precondition does not hold for the given arguments.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical diagnostic could not be resolved unambiguously.
    #[error("diagnostic: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}
