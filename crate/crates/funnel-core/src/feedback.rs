//! Gain law, input nonlinearity and the funnel feedback law.
//!
//! The controller applies u = -eta * h(t, x) with
//!
//! ```text
//! h(t, xi) = alpha(phi(t) * |xi|) * phi(t) * xi,
//! alpha(s) = 1 / (1 - s)  on  [0, 1),
//! ```
//!
//! and the plant input passes through the odd nonlinearity
//!
//! ```text
//! g(v) = v * sin(ln(1 + |v|)),
//! ```
//!
//! which satisfies |g(v)| <= |v| and changes its effective sign on
//! geometrically spaced bands of |v|. Everything here is pure and
//! thread-safe.

use crate::{DriftFunction, EvalError, FunnelFunction, PerturbationSignal, SignParameter};

/// Gain law alpha(s) = 1 / (1 - s), defined on [0, 1).
///
/// alpha(0) = 1 and alpha(s) -> inf as s -> 1. Arguments outside the
/// domain (including NaN) are rejected rather than mapped to infinities.
pub fn alpha_eval(s: f64) -> Result<f64, EvalError> {
    if !(0.0..1.0).contains(&s) {
        return Err(EvalError::GainOutOfDomain { s });
    }
    Ok(1.0 / (1.0 - s))
}

/// Input nonlinearity g(v) = v * sin(ln(1 + |v|)).
///
/// Odd (bit-exactly: g(-v) = -g(v)), |g(v)| <= |v|, and g vanishes at
/// |v| = exp(k * pi) - 1 for every integer k >= 0.
#[must_use]
pub fn g_eval(v: f64) -> f64 {
    v * v.abs().ln_1p().sin()
}

/// Funnel feedback h(t, xi) = alpha(phi(t) * |xi|) * phi(t) * xi.
///
/// Errors when phi(t) * |xi| >= 1, i.e. when (t, xi) lies on or beyond the
/// funnel boundary.
pub fn h_eval(phi: &FunnelFunction, t: f64, xi: f64) -> Result<f64, EvalError> {
    let p = phi.eval(t);
    let w = p * xi.abs();
    // Rejects w >= 1 and NaN alike.
    if w >= 1.0 || w.is_nan() {
        return Err(EvalError::OutsideFunnel { t, xi, w });
    }
    Ok(alpha_eval(w)? * p * xi)
}

/// The closed loop x' = f(p(t), x) + g(-eta * h(t, x)).
///
/// Bundles the plant drift, the perturbation, the funnel shape and the
/// feedback sign; evaluation is pure in (t, x).
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub drift: DriftFunction,
    pub perturbation: PerturbationSignal,
    pub funnel: FunnelFunction,
    pub sign: SignParameter,
}

impl ClosedLoop {
    /// Control value u = -eta * h(t, x).
    pub fn control(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        Ok(-self.sign.eta() * h_eval(&self.funnel, t, x)?)
    }

    /// Right-hand side together with the control that produced it.
    pub fn rhs_and_control(&self, t: f64, x: f64) -> Result<(f64, f64), EvalError> {
        let u = self.control(t, x)?;
        let dx = self.drift.eval(self.perturbation.eval(t), x) + g_eval(u);
        Ok((dx, u))
    }

    /// Right-hand side of the closed loop at (t, x).
    pub fn rhs(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        Ok(self.rhs_and_control(t, x)?.0)
    }
}
