//! Bounded perturbation signals p(t).
//!
//! Every signal carries an a-priori bound: |p(t)| <= bound() for all t >= 0.

use crate::EvalError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A bounded, continuous perturbation signal.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationSignal {
    /// p(t) = value.
    Constant { value: f64 },
    /// p(t) = amplitude * sin(frequency * t + phase).
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Seeded random knots in [-bound, bound] at uniform spacing, joined by
    /// a C1 smoothstep blend. Stays within [-bound, bound] by construction.
    BoundedNoiseSpline {
        seed: u64,
        bound: f64,
        knot_spacing: f64,
        knots: Vec<f64>,
    },
}

impl PerturbationSignal {
    #[must_use]
    pub fn constant(value: f64) -> Self {
        PerturbationSignal::Constant { value }
    }

    #[must_use]
    pub fn sinusoid(amplitude: f64, frequency: f64, phase: f64) -> Self {
        PerturbationSignal::Sinusoid {
            amplitude,
            frequency,
            phase,
        }
    }

    /// Deterministic noise spline covering [0, horizon]; evaluation past the
    /// last knot continues with the final knot value.
    pub fn bounded_noise_spline(
        seed: u64,
        bound: f64,
        knot_spacing: f64,
        horizon: f64,
    ) -> Result<Self, EvalError> {
        let invalid = |reason: String| EvalError::InvalidParameter { reason };
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(invalid(format!("noise bound must be >= 0, got {bound}")));
        }
        if !(knot_spacing.is_finite() && knot_spacing > 0.0) {
            return Err(invalid(format!(
                "knot spacing must be positive, got {knot_spacing}"
            )));
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(invalid(format!("horizon must be >= 0, got {horizon}")));
        }
        let n = (horizon / knot_spacing).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let knots = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        Ok(PerturbationSignal::BoundedNoiseSpline {
            seed,
            bound,
            knot_spacing,
            knots,
        })
    }

    /// A-priori bound on |p(t)|.
    #[must_use]
    pub fn bound(&self) -> f64 {
        match self {
            PerturbationSignal::Constant { value } => value.abs(),
            PerturbationSignal::Sinusoid { amplitude, .. } => amplitude.abs(),
            PerturbationSignal::BoundedNoiseSpline { bound, .. } => *bound,
        }
    }

    #[must_use]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            PerturbationSignal::Constant { value } => *value,
            PerturbationSignal::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            PerturbationSignal::BoundedNoiseSpline {
                knot_spacing,
                knots,
                ..
            } => {
                let s = (t / knot_spacing).max(0.0);
                let i = (s.floor() as usize).min(knots.len() - 2);
                let u = (s - i as f64).clamp(0.0, 1.0);
                // C1 smoothstep: derivative vanishes at both knots, and the
                // value stays between the two knot values.
                let w = u * u * (3.0 - 2.0 * u);
                knots[i] + (knots[i + 1] - knots[i]) * w
            }
        }
    }
}
