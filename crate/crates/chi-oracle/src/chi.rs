//! The feedback gap
//!
//! ```text
//! chi(s) = min { v * f(rho, xi) + v * g(s * v) :
//!                rho in P, xi in K, v in V },   V = [-1, -1/2] u [1/2, 1].
//! ```
//!
//! chi(s) measures the worst-case stabilising power of the scaled feedback
//! over the search box. The computed value is an upper bound on the true
//! minimum that converges from above as the grid refines.

use crate::domain::{CompactBox, GridSpec};
use crate::minimize::minimize;
use crate::ChiError;
use funnel_core::{g_eval, DriftFunction, SignParameter};

/// Result of one gap evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiEvaluation {
    /// Gain scale the gap was evaluated at (may be negative).
    pub s: f64,
    /// Best value found: grid minimum tightened by local refinement.
    pub value: f64,
    /// Minimum of the pure grid stage, before refinement. Monotone under
    /// nested grid refinement.
    pub grid_value: f64,
    /// Location (rho, xi, v) of `value`.
    pub argmin: (f64, f64, f64),
    /// Grid and refinement parameters used.
    pub grid: GridSpec,
}

/// Evaluate the feedback gap at gain scale s over the box.
pub fn chi_eval(
    boxx: &CompactBox,
    drift: &DriftFunction,
    s: f64,
    grid: &GridSpec,
) -> Result<ChiEvaluation, ChiError> {
    if !s.is_finite() {
        return Err(ChiError::NonFiniteInput {
            what: format!("gain scale s = {s}"),
        });
    }
    grid.validate(boxx)?;
    let res = minimize(boxx, grid, |rho, xi, v| {
        v * drift.eval(rho, xi) + v * g_eval(s * v)
    });
    Ok(ChiEvaluation {
        s,
        value: res.value,
        grid_value: res.grid_value,
        argmin: res.point,
        grid: *grid,
    })
}

/// Minimum of v * f(rho, xi) over the box: the drift floor c1 entering
/// every certificate bound.
pub fn drift_floor(
    boxx: &CompactBox,
    drift: &DriftFunction,
    grid: &GridSpec,
) -> Result<f64, ChiError> {
    grid.validate(boxx)?;
    Ok(minimize(boxx, grid, |rho, xi, v| v * drift.eval(rho, xi)).value)
}

/// nu(s) = max(chi(eta * s), 0) for s >= 0: the usable stabilisation margin
/// at gain scale s under feedback orientation eta.
pub fn nu_eval(
    boxx: &CompactBox,
    drift: &DriftFunction,
    sign: SignParameter,
    s: f64,
    grid: &GridSpec,
) -> Result<f64, ChiError> {
    if s.is_nan() || s < 0.0 {
        return Err(ChiError::NegativeGainScale { s });
    }
    Ok(chi_eval(boxx, drift, sign.eta() * s, grid)?.value.max(0.0))
}

/// Empirical modulus of continuity of s -> chi(s): the largest observed
/// difference-quotient magnitude over a sampled window around s_center.
pub fn continuity_probe(
    boxx: &CompactBox,
    drift: &DriftFunction,
    s_center: f64,
    radius: f64,
    samples: usize,
    grid: &GridSpec,
) -> Result<f64, ChiError> {
    if !s_center.is_finite() {
        return Err(ChiError::NonFiniteInput {
            what: format!("probe center {s_center}"),
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(ChiError::InvalidProbe {
            reason: format!("radius must be positive, got {radius}"),
        });
    }
    if samples < 2 {
        return Err(ChiError::InvalidProbe {
            reason: format!("need at least 2 samples, got {samples}"),
        });
    }
    let mut modulus: f64 = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..samples {
        let s = s_center - radius + 2.0 * radius * i as f64 / (samples - 1) as f64;
        let value = chi_eval(boxx, drift, s, grid)?.value;
        if let Some((s0, v0)) = prev {
            modulus = modulus.max(((value - v0) / (s - s0)).abs());
        }
        prev = Some((s, value));
    }
    Ok(modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;

    fn point_zero_box() -> CompactBox {
        CompactBox::new(
            Interval::point(0.0).unwrap(),
            Interval::symmetric(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_drift_zero_scale_gives_zero() {
        let eval = chi_eval(
            &point_zero_box(),
            &DriftFunction::Zero,
            0.0,
            &GridSpec::default(),
        )
        .unwrap();
        assert_eq!(eval.value, 0.0);
        assert_eq!(eval.grid_value, 0.0);
    }

    #[test]
    fn pure_drift_floor_at_zero_scale() {
        let boxx = CompactBox::new(
            Interval::symmetric(1.0).unwrap(),
            Interval::symmetric(1.0).unwrap(),
        )
        .unwrap();
        let drift = DriftFunction::Affine { a: 1.0, b: 0.0 };
        let eval = chi_eval(&boxx, &drift, 0.0, &GridSpec::default()).unwrap();
        assert_eq!(eval.value, -1.0);
        // ties resolve to the first scan point: rho = -1 needs v = +1
        assert_eq!(eval.argmin, (-1.0, -1.0, 1.0));
        assert_eq!(
            drift_floor(&boxx, &drift, &GridSpec::default()).unwrap(),
            -1.0
        );
    }

    #[test]
    fn nu_clamps_at_zero() {
        let boxx = CompactBox::new(
            Interval::symmetric(1.0).unwrap(),
            Interval::symmetric(1.0).unwrap(),
        )
        .unwrap();
        let drift = DriftFunction::Affine { a: 1.0, b: 0.0 };
        let nu = nu_eval(
            &boxx,
            &drift,
            SignParameter::Negative,
            0.0,
            &GridSpec::default(),
        )
        .unwrap();
        assert_eq!(nu, 0.0);
        assert!(matches!(
            nu_eval(
                &boxx,
                &drift,
                SignParameter::Negative,
                -1.0,
                &GridSpec::default()
            ),
            Err(ChiError::NegativeGainScale { .. })
        ));
    }

    #[test]
    fn probe_validation_and_finiteness() {
        let boxx = point_zero_box();
        assert!(matches!(
            continuity_probe(&boxx, &DriftFunction::Zero, 0.0, 0.0, 10, &GridSpec::default()),
            Err(ChiError::InvalidProbe { .. })
        ));
        assert!(matches!(
            continuity_probe(&boxx, &DriftFunction::Zero, 0.0, 1.0, 1, &GridSpec::default()),
            Err(ChiError::InvalidProbe { .. })
        ));
        let m = continuity_probe(
            &boxx,
            &DriftFunction::Zero,
            0.0,
            1.0,
            101,
            &GridSpec::default(),
        )
        .unwrap();
        assert!(m.is_finite());
        // |d/ds chi| <= max |v^2 g'(s v)| <= 2 for |s| <= 1
        assert!(m < 3.0, "modulus {m}");
    }
}
