use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model failed validation ({} violation(s))", .0.len())]
    InvalidModel(Vec<Violation>),

    #[error("t = {t} lies outside the fiber domain (starts at {start})")]
    Domain { t: f64, start: f64 },

    /// The requested count reaches into the continuous spectrum of a
    /// field-free (mu = 0) fiber channel.
    #[error("continuous spectrum channel: lambda = {lambda} exceeds the essential infimum {ess_inf}")]
    ContinuousChannel { lambda: f64, ess_inf: f64 },

    #[error("enumeration budget exceeded: {needed} entries requested, budget is {budget}")]
    Resource { needed: u128, budget: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("ODE integration did not finish within {0} steps")]
    StepLimit(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
