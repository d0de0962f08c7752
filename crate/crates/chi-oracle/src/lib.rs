//! Grid oracle for the feedback gap
//!
//! The closed loop stabilises exactly when scaled feedback can dominate the
//! drift everywhere on a compact parameter box. This crate quantifies that
//! domination: it minimises
//!
//! ```text
//! v * f(rho, xi) + v * g(s * v)
//! ```
//!
//! over (rho, xi, v) in P x K x V with V = [-1, -1/2] u [1/2, 1], by a
//! deterministic uniform grid scan tightened with coordinate-descent
//! refinement. Nested grids (n -> 2n - 1 points per axis) evaluate supersets
//! of the same points bit-exactly, so the grid stage is monotone under
//! refinement and the computed gap is always an upper bound on the true
//! minimum.
//!
//! On top of the evaluator sit unboundedness certificates: along
//! s_n = (1/2) e^((n+1) pi) - 1 the gap grows at least linearly in s_n on
//! the parity branch matching the feedback orientation, and
//! [`certify_unboundedness`] checks the computed gap against that bound
//! index by index.

mod certificate;
mod chi;
mod domain;
mod error;
mod minimize;

pub use certificate::{
    certify_unboundedness, s_sequence, CertificateEntry, UnboundednessCertificate,
    CERT_TOLERANCE,
};
pub use chi::{chi_eval, continuity_probe, drift_floor, nu_eval, ChiEvaluation};
pub use domain::{CompactBox, GridSpec, Interval, V_NEG, V_POS};
pub use error::ChiError;
