use thiserror::Error;

/// Errors raised by the frame library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("operator is not Hermitian (relative skew part {skew:e} exceeds {tol:e})")]
    NotHermitian { skew: f64, tol: f64 },

    #[error(
        "operator is singular to tolerance (smallest singular value {sigma_min:e} <= {tol:e})"
    )]
    Singular { sigma_min: f64, tol: f64 },

    #[error("family is not an E-frame (lower bound {lower:e})")]
    NotAFrame { lower: f64 },

    #[error("not a valid controlled E-frame: {0}")]
    InvalidControlledFrame(String),

    #[error("basis is not orthonormal (Gram deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("right-inverse condition violated: ||T_UE V* - id|| = {deviation:e}")]
    RightInverseViolated { deviation: f64 },

    #[error("null condition violated: ||T_UE V|| = {deviation:e}")]
    NullConditionViolated { deviation: f64 },

    #[error("family is not a controlled dual (||T_UE D* - id|| = {deviation:e})")]
    NotADual { deviation: f64 },

    #[error("Neumann series does not contract (ratio {ratio} >= 1)")]
    NotContractive { ratio: f64 },

    #[error("Neumann series did not converge in {terms} terms (last relative size {last:e})")]
    NotConverged { terms: usize, last: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, FrameError>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(FrameError::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
