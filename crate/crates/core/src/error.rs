use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::solvers::RunResult;

/// Rejected parameters for a problem, noise model or solver configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("objective returned a non-finite gradient at {point:?}")]
    NonFiniteGradient { point: Vec<f64> },
    #[error("point has length {got}, objective dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Oracle(OracleError),
    /// The iterate left the representable range. `run` holds the trajectory up to and
    /// including `last_finite`, with stop reason [`StopReason::GradientOverflow`].
    ///
    /// [`StopReason::GradientOverflow`]: crate::solvers::StopReason::GradientOverflow
    #[error("numeric overflow at iteration {iteration}; last finite iterate kept")]
    GradientOverflow {
        iteration: usize,
        last_finite: Vec<f64>,
        run: Box<RunResult>,
    },
    #[error("step constant grew to {l_k:e} at iteration {iteration}; value oracle looks broken")]
    InnerLoopDivergence { iteration: usize, l_k: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("Δ = 0 gives an infinite iteration budget; stop by rule instead")]
    InfiniteBudget,
    #[error("bound not applicable: {0} is required")]
    NotApplicable(&'static str),
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("trajectory has dimension {got}, problem has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("run carries no iterates; rerun with iterate recording enabled")]
    MissingTrajectory,
}
