use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("non-finite value during integration near x = {x}")]
    NonFinite { x: f64 },
    #[error("step size control stalled near x = {x}")]
    ToleranceNotMet { x: f64 },
    #[error("z = {z} is numerically an eigenvalue")]
    AtEigenvalue { z: Complex64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("function is not in the form domain: {0}")]
    DomainViolation(String),
    #[error("transfer matrix is singular")]
    SingularTransfer,
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("isolated {found} of {requested} eigenvalues below {ceiling:e}")]
    BracketingFailure {
        found: usize,
        requested: usize,
        ceiling: f64,
    },
    #[error("tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailTooLarge { bound: f64, tol: f64 },
    #[error("phase tracking lost near lambda = {lambda}")]
    PhaseTrackingLost { lambda: f64 },
    #[error("boundary data map is singular at z = {z}")]
    SingularLambda { z: Complex64 },
    #[error("z = {z} is not below the discrete spectrum (lowest eigenvalue {lowest})")]
    NotBelowSpectrum { z: f64, lowest: f64 },
    #[error("matrix is not of positive type: {0}")]
    NotPositiveType(String),
    #[error("matrix is not Hermitian positive definite")]
    NotPD,
    #[error("quadrature did not converge (last change {change:e})")]
    QuadratureNotConverged { change: f64 },
    #[error("symmetrized determinant is singular")]
    SingularDeterminant,
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::GridMismatch(_)
                | Error::DomainViolation(_)
                | Error::UnsupportedCase(_)
                | Error::NotPositiveType(_)
                | Error::NotPD
                | Error::NotBelowSpectrum { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-4 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("tolerance {tol} outside (0, 1e-4]")))
    }
}
