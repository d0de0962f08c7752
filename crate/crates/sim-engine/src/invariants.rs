//! Post-hoc checks of the closed-loop guarantees on a simulated run.

use crate::trajectory::{Trajectory, TrajectoryStatus};

/// Default |x| threshold for calling the tail of a run converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-2;
/// Default trailing window fraction the threshold must hold on.
pub const CONVERGENCE_WINDOW: f64 = 0.2;

/// Outcome of the containment, convergence and control-size checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    /// Run completed its horizon and every sample stayed strictly inside
    /// the funnel.
    pub funnel_contained: bool,
    /// Smallest boundary clearance min over samples of (1 - w).
    pub containment_margin: f64,
    /// |x| stayed at or below the threshold over the whole trailing
    /// window (completed runs only).
    pub converged: bool,
    /// sup |u| respects w_max / (1 - w_max) up to round-off, the bound
    /// implied by the deepest funnel excursion: |u| = w / (1 - w)
    /// pointwise and that map is increasing in w.
    pub control_bounded: bool,
    /// Containment and control boundedness together. Convergence is
    /// reported, not required: shallow funnels legitimately complete
    /// without reaching a small state.
    pub global: bool,
}

/// Check a trajectory against the closed-loop guarantees.
///
/// `threshold` is the convergence level on |x|, `window` the trailing
/// fraction of the horizon it must hold on.
#[must_use]
pub fn check_invariants(traj: &Trajectory, threshold: f64, window: f64) -> InvariantReport {
    let completed = traj.status == TrajectoryStatus::CompletedHorizon;

    let mut containment_margin = f64::INFINITY;
    for s in &traj.samples {
        containment_margin = containment_margin.min(1.0 - s.w);
    }
    if traj.samples.is_empty() {
        containment_margin = 0.0;
    }
    let funnel_contained = completed && containment_margin > 0.0;

    let t_end = traj.t_reached();
    let window_start = (1.0 - window) * t_end;
    let converged = completed
        && traj
            .samples
            .iter()
            .filter(|s| s.t >= window_start)
            .all(|s| s.x.abs() <= threshold);

    let w_max = traj.stats.max_w;
    let control_bounded = if w_max < 1.0 {
        traj.stats.sup_abs_u <= w_max / (1.0 - w_max) + 1e-9
    } else {
        false
    };

    InvariantReport {
        funnel_contained,
        containment_margin,
        converged,
        control_bounded,
        global: funnel_contained && control_bounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Sample, TrajectoryStats};

    fn sample(t: f64, x: f64, u: f64, w: f64) -> Sample {
        Sample {
            t,
            x,
            u,
            w,
            k: 1.0 / (1.0 - w),
        }
    }

    fn traj(samples: Vec<Sample>, status: TrajectoryStatus) -> Trajectory {
        let mut max_w = 0.0f64;
        let mut sup_abs_u = 0.0f64;
        let mut max_k = 0.0f64;
        for s in &samples {
            max_w = max_w.max(s.w);
            sup_abs_u = sup_abs_u.max(s.u.abs());
            max_k = max_k.max(s.k);
        }
        let final_abs_x = samples.last().map_or(0.0, |s| s.x.abs());
        Trajectory {
            samples,
            status,
            stats: TrajectoryStats {
                max_w,
                sup_abs_u,
                final_abs_x,
                max_k,
            },
            steps_accepted: 0,
            steps_rejected: 0,
        }
    }

    #[test]
    fn contained_convergent_run_passes_all() {
        let t = traj(
            vec![
                sample(0.0, 0.5, 0.0, 0.0),
                sample(5.0, 0.1, 0.6, 0.5),
                sample(10.0, 0.005, 0.05, 0.05),
            ],
            TrajectoryStatus::CompletedHorizon,
        );
        let r = check_invariants(&t, 1e-2, 0.2);
        assert!(r.funnel_contained);
        assert!(r.converged);
        assert!(r.control_bounded);
        assert!(r.global);
        assert!((r.containment_margin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn escape_fails_containment_even_with_small_w() {
        let t = traj(
            vec![sample(0.0, 0.5, 0.0, 0.0), sample(1.0, 0.3, 0.4, 0.3)],
            TrajectoryStatus::BoundaryEscape { t_fail: 1.0 },
        );
        let r = check_invariants(&t, 1e-2, 0.2);
        assert!(!r.funnel_contained);
        assert!(!r.converged);
        assert!(!r.global);
    }

    #[test]
    fn tail_excursion_defeats_convergence() {
        let t = traj(
            vec![
                sample(0.0, 0.5, 0.0, 0.0),
                sample(9.0, 0.05, 0.1, 0.1),
                sample(10.0, 0.005, 0.05, 0.05),
            ],
            TrajectoryStatus::CompletedHorizon,
        );
        let r = check_invariants(&t, 1e-2, 0.2);
        assert!(r.funnel_contained);
        assert!(!r.converged, "|x| = 0.05 at t = 9 sits inside the window");
    }

    #[test]
    fn oversized_control_is_flagged() {
        let t = traj(
            vec![sample(0.0, 0.5, 0.0, 0.0), sample(1.0, 0.5, 9.0, 0.5)],
            TrajectoryStatus::CompletedHorizon,
        );
        let r = check_invariants(&t, 1e-2, 0.2);
        assert!(r.funnel_contained);
        assert!(!r.control_bounded, "|u| = 9 exceeds w/(1-w) = 1");
        assert!(!r.global);
    }
}
