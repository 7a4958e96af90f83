use thiserror::Error;

/// Errors raised by the q-Fock space routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The deformation parameter left the open interval (-1, 1).
    #[error("deformation parameter must satisfy |q| < 1, got {0}")]
    Domain(f64),

    /// A caller-supplied argument is out of range or malformed.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The truncation level cannot hold the requested computation.
    #[error("truncation level {trunc} is too small, at least {required} is needed")]
    Truncation { trunc: usize, required: usize },

    /// A dense representation of the truncated space would be too large.
    #[error("dense truncated basis would hold {0} vectors, above the supported limit")]
    TooLarge(u128),

    /// A numerical routine failed (non-finite values, failed factorization, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(q))
    }
}
