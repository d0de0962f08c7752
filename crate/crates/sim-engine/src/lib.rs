//! Closed-loop trajectory engine
//!
//! Integrates the scalar funnel-feedback loop
//!
//! ```text
//! x'(t) = f(p(t), x(t)) + g(u(t)),      u = -eta h(t, x),
//! ```
//!
//! from the funnel mouth at t = 0 to a horizon, producing a densely
//! sampled trajectory with per-sample control, funnel coordinate and gain
//! diagnostics, plus post-hoc invariant checks (containment, convergence,
//! control boundedness).
//!
//! The stepper is an adaptive L-stable Rosenbrock 3(2) pair: near the
//! funnel boundary the loop is stiff (local rates grow like phi(t) times
//! the squared gain), which rules out explicit pairs at realistic
//! horizons. A boundary guard rejects any stage entering the outer margin
//! of the funnel, separating genuine boundary escapes from ordinary step
//! failures.

mod error;
mod invariants;
mod scenario;
mod solver;
mod trajectory;

pub use error::SimError;
pub use invariants::{
    check_invariants, InvariantReport, CONVERGENCE_THRESHOLD, CONVERGENCE_WINDOW,
};
pub use scenario::{ScenarioSpec, Tolerances};
pub use solver::simulate;
pub use trajectory::{Sample, Trajectory, TrajectoryStats, TrajectoryStatus};
