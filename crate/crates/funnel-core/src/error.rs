use thiserror::Error;

/// Errors raised by the pointwise evaluation layer.
///
/// Every operation in this crate is total on its documented domain and
/// returns an error (never an infinity or NaN) when called outside it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// The gain law is defined on [0, 1) only.
    #[error("gain argument {s} lies outside [0, 1)")]
    GainOutOfDomain { s: f64 },

    /// Feedback was requested at a point on or beyond the funnel boundary,
    /// where the gain is unbounded.
    #[error("point (t = {t}, xi = {xi}) is outside the funnel: phi(t)*|xi| = {w} >= 1")]
    OutsideFunnel { t: f64, xi: f64, w: f64 },

    /// A constructor rejected a parameter (non-finite, wrong sign, or an
    /// inconsistent interpolation table).
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
}
