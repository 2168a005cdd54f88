use thiserror::Error;

/// Errors raised by the assessment model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration or state parameter violates its domain.
    #[error("invalid {field}: {reason} (got {value})")]
    InvalidParameter {
        field: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// A response observation is outside its domain.
    #[error("invalid observation: {reason} (got {value})")]
    InvalidObservation { reason: &'static str, value: f64 },

    /// Doubling the quadrature order moved the value by more than the tolerance.
    #[error("quadrature did not converge: {coarse} vs {fine} exceeds tolerance {tolerance}")]
    QuadratureNotConverged {
        coarse: f64,
        fine: f64,
        tolerance: f64,
    },
}

impl Error {
    /// Name of the offending field, when there is one.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::InvalidParameter { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: &'static str, value: f64) -> Error {
    Error::InvalidParameter {
        field,
        reason,
        value,
    }
}
