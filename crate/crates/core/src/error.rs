use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every public operation either returns finite values or one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument lies on a branch cut")]
    Cut { op: &'static str },

    #[error("{op}: iteration did not converge (last residual {residual:e})")]
    NonConvergence { op: &'static str, residual: f64 },

    #[error("{op}: converged to a non-physical branch")]
    BranchAmbiguity { op: &'static str },

    #[error("{op}: argument coincides with a pole")]
    Pole { op: &'static str },

    #[error("{op}: trajectory hit a singularity of the initial measure")]
    SingularityHit { op: &'static str },

    /// Internal signal from right-hand sides: the flow denominator vanished.
    #[error("{op}: caustic (vanishing denominator)")]
    Caustic { op: &'static str },

    #[error("{op}: residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { op: &'static str, residual: f64 },

    #[error("{op}: point lies inside the hull")]
    HullInterior { op: &'static str },

    #[error("{op}: argument outside the validity window")]
    OutOfRange { op: &'static str },

    #[error("{op}: no root with positive w^2")]
    NoPhysicalRoot { op: &'static str },

    #[error("step_dyson: ordering still violated after {halvings} halvings")]
    StepFailure { halvings: u32 },

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("{op}: non-finite value")]
    NonFinite { op: &'static str },
}

impl Error {
    /// Name of the operation that failed, when it has one.
    pub fn operation(&self) -> &'static str {
        match self {
            Error::Cut { op }
            | Error::NonConvergence { op, .. }
            | Error::BranchAmbiguity { op }
            | Error::Pole { op }
            | Error::SingularityHit { op }
            | Error::Caustic { op }
            | Error::ResidualTooLarge { op, .. }
            | Error::HullInterior { op }
            | Error::OutOfRange { op }
            | Error::NoPhysicalRoot { op }
            | Error::NonFinite { op } => op,
            Error::StepFailure { .. } => "step_dyson",
            Error::BadConfig(_) => "config",
        }
    }

    /// Residual carried by the error, if any.
    pub fn residual(&self) -> Option<f64> {
        match self {
            Error::NonConvergence { residual, .. } | Error::ResidualTooLarge { residual, .. } => {
                Some(*residual)
            }
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(op: &'static str, z: num_complex::Complex64) -> Result<num_complex::Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite { op })
    }
}
