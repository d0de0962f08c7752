//! Funnel shape functions.
//!
//! A funnel function maps elapsed time to the reciprocal radius of the
//! admissible tube around zero: at time t the state must satisfy
//! phi(t) * |x| < 1. Shapes here are C1 bijections of [0, inf) onto itself
//! with derivative growth bounded by c_phi * (1 + phi(t)).

use crate::EvalError;

/// Shape family of a funnel function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunnelShape {
    /// phi(t) = t.
    Identity,
    /// phi(t) = exp(rate * t) - 1, rate > 0.
    ExpMinusOne { rate: f64 },
}

/// A funnel shape together with its growth constant c_phi.
///
/// Invariants: phi(0) = 0, phi is strictly increasing and unbounded, and
/// phi'(t) <= c_phi * (1 + phi(t)) for all t >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunnelFunction {
    shape: FunnelShape,
    c_phi: f64,
}

impl FunnelFunction {
    /// The identity shape, c_phi = 1.
    #[must_use]
    pub fn identity() -> Self {
        FunnelFunction {
            shape: FunnelShape::Identity,
            c_phi: 1.0,
        }
    }

    /// The exponential shape phi(t) = exp(rate * t) - 1.
    ///
    /// Its derivative satisfies phi'(t) = rate * (1 + phi(t)) exactly, so
    /// c_phi = rate.
    pub fn exp_minus_one(rate: f64) -> Result<Self, EvalError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(EvalError::InvalidParameter {
                reason: format!("funnel rate must be finite and positive, got {rate}"),
            });
        }
        Ok(FunnelFunction {
            shape: FunnelShape::ExpMinusOne { rate },
            c_phi: rate,
        })
    }

    #[must_use]
    pub fn shape(&self) -> FunnelShape {
        self.shape
    }

    /// Growth constant in phi'(t) <= c_phi * (1 + phi(t)).
    #[must_use]
    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    /// phi(t). Callers keep t >= 0; negative arguments propagate into
    /// negative values that downstream domain checks reject.
    #[must_use]
    pub fn eval(&self, t: f64) -> f64 {
        match self.shape {
            FunnelShape::Identity => t,
            FunnelShape::ExpMinusOne { rate } => (rate * t).exp_m1(),
        }
    }

    /// Analytic derivative phi'(t).
    #[must_use]
    pub fn derivative(&self, t: f64) -> f64 {
        match self.shape {
            FunnelShape::Identity => 1.0,
            FunnelShape::ExpMinusOne { rate } => rate * (rate * t).exp(),
        }
    }
}
