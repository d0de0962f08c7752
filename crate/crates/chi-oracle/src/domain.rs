//! Search domain: perturbation range P, state range K and the fixed
//! control shell V = [-1, -1/2] u [1/2, 1].

use crate::ChiError;

/// Closed bounded interval [lo, hi], possibly degenerate (lo == hi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, ChiError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(ChiError::InvalidBox {
                reason: format!("interval [{lo}, {hi}] must be finite and ordered"),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval holding a single point.
    pub fn point(x: f64) -> Result<Self, ChiError> {
        Interval::new(x, x)
    }

    /// Symmetric interval [-r, r].
    pub fn symmetric(r: f64) -> Result<Self, ChiError> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(ChiError::InvalidBox {
                reason: format!("symmetric radius must be >= 0, got {r}"),
            });
        }
        Interval::new(-r, r)
    }

    #[must_use]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[must_use]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[must_use]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[must_use]
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    #[must_use]
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Uniform grid point i of n on the interval. Grids built by this rule
    /// nest exactly under n -> 2n - 1 refinement: the step halves exactly
    /// in binary arithmetic, so shared points are bit-identical.
    #[must_use]
    pub fn grid_point(&self, i: usize, n: usize) -> f64 {
        if n <= 1 || self.is_degenerate() {
            return self.lo;
        }
        let step = self.width() / (n - 1) as f64;
        if i == n - 1 {
            self.hi
        } else {
            self.lo + step * i as f64
        }
    }
}

/// Negative and positive halves of the control shell V.
pub const V_NEG: (f64, f64) = (-1.0, -0.5);
pub const V_POS: (f64, f64) = (0.5, 1.0);

/// Compact search box P x K for the perturbation and state arguments.
///
/// P may be a single point ({0} is common); K must have positive width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBox {
    p: Interval,
    k: Interval,
}

impl CompactBox {
    pub fn new(p: Interval, k: Interval) -> Result<Self, ChiError> {
        if k.is_degenerate() {
            return Err(ChiError::InvalidBox {
                reason: "state range K must have positive width".into(),
            });
        }
        Ok(CompactBox { p, k })
    }

    #[must_use]
    pub fn p(&self) -> Interval {
        self.p
    }

    #[must_use]
    pub fn k(&self) -> Interval {
        self.k
    }
}

/// Grid resolution and local refinement depth for the brute-force search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Points on P (collapsed to 1 when P is degenerate).
    pub p_points: usize,
    /// Points on K.
    pub k_points: usize,
    /// Points on each half of V.
    pub v_half_points: usize,
    /// Rounds of local coordinate-descent refinement, each halving the
    /// search window.
    pub refinement_depth: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            p_points: 64,
            k_points: 64,
            v_half_points: 32,
            refinement_depth: 6,
        }
    }
}

impl GridSpec {
    pub(crate) fn validate(&self, boxx: &CompactBox) -> Result<(), ChiError> {
        let need = |axis: &str, n: usize| -> Result<(), ChiError> {
            if n < 3 {
                Err(ChiError::InvalidGrid {
                    reason: format!("{axis} axis needs at least 3 points, got {n}"),
                })
            } else {
                Ok(())
            }
        };
        if !boxx.p().is_degenerate() {
            need("P", self.p_points)?;
        }
        need("K", self.k_points)?;
        need("V half", self.v_half_points)
    }
}
