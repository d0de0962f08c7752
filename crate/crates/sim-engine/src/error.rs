use thiserror::Error;

/// Scenario-level failures. Integration failures (boundary escape, step
/// collapse) are trajectory statuses, not errors: a failed run still
/// carries its partial trajectory.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },
}
