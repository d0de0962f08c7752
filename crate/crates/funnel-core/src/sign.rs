//! Feedback sign parameter.

use crate::EvalError;

/// Orientation of the feedback interconnection.
///
/// `Negative` applies u = -h(t, x) (classical negative feedback),
/// `Positive` applies u = +h(t, x). Stored as eta in {+1, -1} with
/// u = -eta * h.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignParameter {
    Negative,
    Positive,
}

impl SignParameter {
    /// eta value: +1 for negative feedback, -1 for positive feedback.
    #[must_use]
    pub fn eta(self) -> f64 {
        match self {
            SignParameter::Negative => 1.0,
            SignParameter::Positive => -1.0,
        }
    }

    /// Parse from an integer eta in {+1, -1}.
    pub fn from_eta(eta: i32) -> Result<Self, EvalError> {
        match eta {
            1 => Ok(SignParameter::Negative),
            -1 => Ok(SignParameter::Positive),
            other => Err(EvalError::InvalidParameter {
                reason: format!("eta must be +1 or -1, got {other}"),
            }),
        }
    }
}

impl std::fmt::Display for SignParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignParameter::Negative => write!(f, "+1"),
            SignParameter::Positive => write!(f, "-1"),
        }
    }
}
