use thiserror::Error;

/// Errors produced by `kirchhoff-core`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("outside the domain of definition: {0}")]
    Domain(String),

    #[error("operation not defined on this branch: {0}")]
    WrongBranch(String),

    #[error("condition D1 fails: min of g'(t)/t is {min_value} >= 0 at t = {t3}")]
    D1Violation { min_value: f64, t3: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("rules {existence} and {nonexistence} both fire")]
    Inconsistent {
        existence: &'static str,
        nonexistence: &'static str,
    },

    #[error("bad geometry: {0}")]
    Geometry(String),

    #[error("fiber has no interior maximum on (0, inf)")]
    NoPeak,

    #[error("ray through the iterate misses the N- component (iteration {iteration})")]
    ProjectionFailure { iteration: usize },

    #[error("descent stagnated after {iterations} iterations at residual {residual:e}")]
    Stagnation { iterations: usize, residual: f64 },

    #[error("refusing to solve: parameters classify as NotExists ({criterion})")]
    Refused { criterion: &'static str },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("nonexistence invariant violated: slack {slack:e} at A = {at:e}")]
    InvariantViolation { slack: f64, at: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
