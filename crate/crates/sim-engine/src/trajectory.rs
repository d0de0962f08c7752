//! Simulation output: reporting-grid samples, termination status and
//! summary statistics.

/// One reporting-grid sample of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Time.
    pub t: f64,
    /// State.
    pub x: f64,
    /// Control applied at (t, x); NaN if the sample sits outside the
    /// funnel and the feedback is undefined there.
    pub u: f64,
    /// Funnel coordinate w = phi(t) |x|; containment means w < 1.
    pub w: f64,
    /// Feedback gain 1 / (1 - w); infinite on or outside the boundary.
    pub k: f64,
}

/// How the integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    /// Reached the horizon with every accepted point inside the guarded
    /// funnel.
    CompletedHorizon,
    /// The step size collapsed while the guard kept rejecting stages
    /// pressed against the funnel boundary.
    BoundaryEscape {
        /// Last time the solver still held a valid state.
        t_fail: f64,
    },
    /// The step size or the step budget ran out away from the boundary.
    StepUnderflow {
        /// Last time the solver still held a valid state.
        t_fail: f64,
    },
}

impl TrajectoryStatus {
    #[must_use]
    pub fn is_complete(&self) -> bool {
        matches!(self, TrajectoryStatus::CompletedHorizon)
    }
}

/// Extremes over the reporting grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStats {
    /// Largest funnel coordinate observed.
    pub max_w: f64,
    /// Largest control magnitude observed.
    pub sup_abs_u: f64,
    /// |x| at the final sample.
    pub final_abs_x: f64,
    /// Largest feedback gain observed.
    pub max_k: f64,
}

/// Full record of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Samples on the merged reporting grid (uniform grid plus every
    /// accepted step time), strictly increasing in t.
    pub samples: Vec<Sample>,
    pub status: TrajectoryStatus,
    pub stats: TrajectoryStats,
    /// Accepted integration steps.
    pub steps_accepted: u64,
    /// Rejected step attempts (error control and boundary guard).
    pub steps_rejected: u64,
}

impl Trajectory {
    /// Time of the last valid sample.
    #[must_use]
    pub fn t_reached(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// The gain history (t, 1 / (1 - w)) over the reporting grid.
    #[must_use]
    pub fn gain_timeseries(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.k)).collect()
    }
}
