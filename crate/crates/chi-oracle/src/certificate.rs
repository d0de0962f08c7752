//! Unbounded-margin certificates
//!
//! Along the gain-scale sequence
//!
//! ```text
//! s_n = (1/2) e^((n+1) pi) - 1,
//! ```
//!
//! the signal ln(1 + s |v|) sweeps a half-period of the sine for every
//! |v| in [1/2, 1], with a definite sign fixed by the parity of n:
//!
//! ```text
//! ln(1 + s_n)       = (n+1) pi - ln 2,
//! ln(1 + s_n / 2)   > n pi + pi/2.
//! ```
//!
//! On even n the sine is positive over the swept window, on odd n negative,
//! and |sin| >= sin(ln 2) throughout. Orienting the feedback with the
//! parity (eta = +1 on even n, eta = -1 on odd n) therefore yields
//!
//! ```text
//! chi(eta s_n) >= c1 + (1/4) s_n sin(ln 2),    c1 = min v f(rho, xi),
//! ```
//!
//! a lower bound growing without limit in n. A certificate records the
//! computed gap against this bound for every index of the matching parity.

use crate::chi::{chi_eval, drift_floor};
use crate::domain::{CompactBox, GridSpec};
use crate::ChiError;
use funnel_core::{DriftFunction, SignParameter};

/// Accept margins down to -CERT_TOLERANCE: the computed gap is itself an
/// upper bound on the true minimum, so in exact arithmetic the margin is
/// nonnegative; the slack absorbs refinement round-off only.
pub const CERT_TOLERANCE: f64 = 1.0e-6;

/// Largest index for which s_n is representable in f64.
const MAX_SEQUENCE_INDEX: u32 = 224;

/// The certified gain-scale sequence s_n = (1/2) e^((n+1) pi) - 1.
pub fn s_sequence(n: u32) -> Result<f64, ChiError> {
    if n > MAX_SEQUENCE_INDEX {
        return Err(ChiError::SequenceOverflow { n });
    }
    Ok(0.5 * ((n as f64 + 1.0) * std::f64::consts::PI).exp() - 1.0)
}

/// One certified index of the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateEntry {
    /// Sequence index (parity matches the feedback orientation).
    pub n: u32,
    /// Gain scale s_n.
    pub s_n: f64,
    /// Computed gap chi(eta * s_n).
    pub chi: f64,
    /// Certified lower bound c1 + (1/4) s_n sin(ln 2).
    pub bound: f64,
    /// chi - bound; certification requires margin >= -CERT_TOLERANCE.
    pub margin: f64,
}

/// Certificate that the stabilisation margin nu is unbounded along the
/// sequence branch matching one feedback orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundednessCertificate {
    /// Feedback orientation the branch certifies.
    pub sign: SignParameter,
    /// Drift floor c1 = min v f(rho, xi) over the box.
    pub c1: f64,
    /// Margin acceptance tolerance used.
    pub tolerance: f64,
    /// Certified entries in increasing n.
    pub entries: Vec<CertificateEntry>,
}

impl UnboundednessCertificate {
    /// Render as structured text: header lines then one CSV row per entry,
    /// full f64 precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# eta {}\n", self.sign));
        out.push_str(&format!("# c1 {:.16e}\n", self.c1));
        out.push_str(&format!("# tolerance {:.16e}\n", self.tolerance));
        out.push_str("n,s_n,chi,bound,margin\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                e.n, e.s_n, e.chi, e.bound, e.margin
            ));
        }
        out
    }
}

/// Certify unboundedness of the margin over the box for one feedback
/// orientation, checking every sequence index of matching parity up to
/// n_max inclusive.
pub fn certify_unboundedness(
    boxx: &CompactBox,
    drift: &DriftFunction,
    sign: SignParameter,
    n_max: u32,
    grid: &GridSpec,
) -> Result<UnboundednessCertificate, ChiError> {
    grid.validate(boxx)?;
    let want_even = matches!(sign, SignParameter::Negative);
    let indices: Vec<u32> = (0..=n_max)
        .filter(|n| (n % 2 == 0) == want_even)
        .collect();
    if indices.is_empty() {
        return Err(ChiError::EmptyBranch {
            eta: sign.eta() as i32,
            n_max,
        });
    }
    let c1 = drift_floor(boxx, drift, grid)?;
    let sin_ln2 = std::f64::consts::LN_2.sin();
    let mut entries = Vec::with_capacity(indices.len());
    for n in indices {
        let s_n = s_sequence(n)?;
        let chi = chi_eval(boxx, drift, sign.eta() * s_n, grid)?.value;
        let bound = c1 + 0.25 * s_n * sin_ln2;
        let margin = chi - bound;
        if margin < -CERT_TOLERANCE {
            return Err(ChiError::CertificationFailed {
                n,
                chi,
                bound,
                tolerance: CERT_TOLERANCE,
            });
        }
        entries.push(CertificateEntry {
            n,
            s_n,
            chi,
            bound,
            margin,
        });
    }
    Ok(UnboundednessCertificate {
        sign,
        c1,
        tolerance: CERT_TOLERANCE,
        entries,
    })
}
