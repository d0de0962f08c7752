//! Pointwise function layer for funnel feedback of a scalar plant.
//!
//! The controlled system is
//!
//! ```text
//! x'(t) = f(p(t), x(t)) + g(u(t)),      u(t) = -eta * h(t, x(t)),
//! ```
//!
//! where f is a drift term, p a bounded perturbation, g an odd input
//! nonlinearity and h the funnel feedback built from a funnel shape phi
//! and the gain law alpha(s) = 1 / (1 - s). The sign eta in {+1, -1}
//! selects negative or positive feedback orientation.
//!
//! All evaluations are pure; domain violations surface as [`EvalError`]
//! values rather than infinities or NaN.

mod drift;
mod error;
mod feedback;
mod funnel;
mod perturbation;
mod sign;

pub use drift::{DriftFunction, DriftTable};
pub use error::EvalError;
pub use feedback::{alpha_eval, g_eval, h_eval, ClosedLoop};
pub use funnel::{FunnelFunction, FunnelShape};
pub use perturbation::PerturbationSignal;
pub use sign::SignParameter;
