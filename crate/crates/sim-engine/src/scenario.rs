//! Run description: the closed loop plus integration controls.

use crate::SimError;
use funnel_core::ClosedLoop;

/// Local error tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance against the state magnitude.
    pub rel: f64,
    /// Absolute tolerance at unit funnel width; the effective absolute
    /// floor shrinks with 1 / phi(t) as the funnel tightens.
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-6,
            abs: 1e-9,
        }
    }
}

/// Everything needed to integrate one closed-loop run.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub plant: ClosedLoop,
    /// Initial state; the funnel opens from zero width at t = 0, so any
    /// finite value starts inside.
    pub x0: f64,
    /// Horizon.
    pub t_end: f64,
    pub tolerances: Tolerances,
    /// Stage guard: any stage or step endpoint with w >= 1 - guard_margin
    /// is rejected and the step halved.
    pub guard_margin: f64,
    /// Attempted-step limit (accepted plus rejected).
    pub step_budget: u64,
}

impl ScenarioSpec {
    /// Scenario with default tolerances, guard and budget.
    #[must_use]
    pub fn new(plant: ClosedLoop, x0: f64, t_end: f64) -> Self {
        ScenarioSpec {
            plant,
            x0,
            t_end,
            tolerances: Tolerances::default(),
            guard_margin: 1e-3,
            step_budget: 5_000_000,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), SimError> {
        let bad = |reason: String| Err(SimError::InvalidScenario { reason });
        if !self.x0.is_finite() {
            return bad(format!("x0 must be finite, got {}", self.x0));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.tolerances.rel.is_finite() && self.tolerances.rel > 0.0) {
            return bad(format!(
                "relative tolerance must be positive, got {}",
                self.tolerances.rel
            ));
        }
        if !(self.tolerances.abs.is_finite() && self.tolerances.abs > 0.0) {
            return bad(format!(
                "absolute tolerance must be positive, got {}",
                self.tolerances.abs
            ));
        }
        if !(self.guard_margin > 0.0 && self.guard_margin < 1.0) {
            return bad(format!(
                "guard margin must lie in (0, 1), got {}",
                self.guard_margin
            ));
        }
        if self.step_budget == 0 {
            return bad("step budget must be at least 1".into());
        }
        Ok(())
    }
}
