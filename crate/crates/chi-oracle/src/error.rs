use thiserror::Error;

/// Errors raised by gap evaluation and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChiError {
    /// A search box was empty, unbounded or otherwise malformed.
    #[error("invalid search box: {reason}")]
    InvalidBox { reason: String },

    /// A grid specification cannot resolve the box.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    /// s_n left the representable range.
    #[error("gain sequence overflows f64 at index {n}")]
    SequenceOverflow { n: u32 },

    /// certify_unboundedness was asked for a branch with no indices.
    #[error("no certificate indices for eta = {eta} with n_max = {n_max}")]
    EmptyBranch { eta: i32, n_max: u32 },

    /// A computed gap fell below its analytic lower bound.
    #[error("certification failed at n = {n}: chi = {chi} < bound = {bound} - {tolerance}")]
    CertificationFailed {
        n: u32,
        chi: f64,
        bound: f64,
        tolerance: f64,
    },

    /// nu is defined for non-negative gain scales only.
    #[error("negative gain scale {s} passed to nu")]
    NegativeGainScale { s: f64 },

    /// A scalar argument was NaN or infinite.
    #[error("non-finite input: {what}")]
    NonFiniteInput { what: String },

    /// continuity_probe parameter validation.
    #[error("invalid probe: {reason}")]
    InvalidProbe { reason: String },
}
