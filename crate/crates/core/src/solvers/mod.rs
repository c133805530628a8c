//! Gradient methods with gradient-norm early stopping.
//!
//! Both solvers evaluate the stopping rule on the same inexact gradient `∇̃f(x_k)` that would
//! drive the next step, and return `x̂ = x_k` without moving when it fires.

mod adaptive;
mod const_step;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

pub use adaptive::{run_adaptive_gd, AdaptiveConfig};
pub use const_step::{run_const_step_gd, ConstStepConfig};

use crate::error::{ConfigError, OracleError, SolverError};
use crate::vector::{self, Vector};

/// Default safety cap on the number of steps.
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

/// `‖∇̃f‖ ≤ √6·Δ`
pub fn check_stop_const(tilde_grad: &[f64], delta: f64) -> bool {
    vector::norm(tilde_grad) <= 6.0f64.sqrt() * delta
}

/// `‖∇̃f‖ ≤ 2Δ`
pub fn check_stop_adaptive(tilde_grad: &[f64], delta: f64) -> bool {
    vector::norm(tilde_grad) <= 2.0 * delta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StopCriterion {
    /// Threshold `√6·Δ`.
    Const,
    /// Threshold `2Δ`.
    Adaptive,
    /// Run until the iteration cap.
    None,
}

impl StopCriterion {
    /// The threshold for the given `Δ`, computed on every call.
    pub fn threshold(&self, delta: f64) -> Option<f64> {
        match self {
            StopCriterion::Const => Some(6.0f64.sqrt() * delta),
            StopCriterion::Adaptive => Some(2.0 * delta),
            StopCriterion::None => None,
        }
    }

    pub fn is_met(&self, tilde_grad: &[f64], delta: f64) -> bool {
        match self {
            StopCriterion::Const => check_stop_const(tilde_grad, delta),
            StopCriterion::Adaptive => check_stop_adaptive(tilde_grad, delta),
            StopCriterion::None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StopRule {
    pub criterion: StopCriterion,
    pub max_iters: usize,
}

impl StopRule {
    pub fn new(criterion: StopCriterion, max_iters: usize) -> Self {
        Self {
            criterion,
            max_iters,
        }
    }

    pub fn const_rule() -> Self {
        Self::new(StopCriterion::Const, DEFAULT_MAX_ITERS)
    }

    pub fn adaptive_rule() -> Self {
        Self::new(StopCriterion::Adaptive, DEFAULT_MAX_ITERS)
    }

    pub fn none(max_iters: usize) -> Self {
        Self::new(StopCriterion::None, max_iters)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.max_iters == 0 {
            return Err(ConfigError::Invalid("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One row of a trajectory: the state at `x_k` and, for the adaptive method, the step
/// constant accepted for the move `x_k → x_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub k: usize,
    /// `f(x_k) − f*` when `f*` is known, otherwise `f(x_k)`.
    pub f_gap: f64,
    pub exact_grad_norm: f64,
    pub tilde_grad_norm: f64,
    pub dist_from_x0: f64,
    pub l_k: Option<f64>,
    pub inner_evals: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StopReason {
    RuleTriggered,
    MaxIters,
    GradientOverflow,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult {
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// The output point `x̂`.
    pub x_hat: Vector,
    pub total_value_queries: usize,
    pub total_grad_queries: usize,
    /// `f*` used for `f_gap`, if any.
    pub f_star: Option<f64>,
    /// `x_0, x_1, …` when iterate recording is enabled, otherwise empty.
    pub iterates: Vec<Vector>,
}

impl RunResult {
    /// Index of the last record, i.e. the number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("a run has at least one record")
    }

    /// Total number of candidate trials `I(N)` of the adaptive method.
    pub fn candidate_trials(&self) -> usize {
        self.records.iter().filter_map(|r| r.inner_evals).sum()
    }

    /// Largest accepted step constant.
    pub fn max_accepted_l(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.l_k)
            .fold(None, |acc, l| Some(acc.map_or(l, |a: f64| a.max(l))))
    }

    pub fn min_accepted_l(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.l_k)
            .fold(None, |acc, l| Some(acc.map_or(l, |a: f64| a.min(l))))
    }

    /// Descriptive effective step constant
    /// `L̂ = (μ/4) / (1 − (Π (1 − μ/(4L_j)))^(1/N))` over the accepted `L_j`.
    ///
    /// Carries no guarantee; `None` without accepted steps or when `μ/(4L_j) ≥ 1` somewhere.
    pub fn effective_l(&self, mu: f64) -> Option<f64> {
        let ls: Vec<f64> = self.records.iter().filter_map(|r| r.l_k).collect();
        if ls.is_empty() || mu.is_nan() || mu <= 0.0 {
            return None;
        }
        let mut log_prod = 0.0;
        for l in &ls {
            let q = 1.0 - mu / (4.0 * l);
            if q <= 0.0 {
                return None;
            }
            log_prod += q.ln();
        }
        let geo = (log_prod / ls.len() as f64).exp();
        Some(mu / 4.0 / (1.0 - geo))
    }
}

struct Recorder {
    x0: Vector,
    f_star: Option<f64>,
    keep_iterates: bool,
    records: Vec<IterationRecord>,
    iterates: Vec<Vector>,
}

impl Recorder {
    fn new(x0: &[f64], f_star: Option<f64>, keep_iterates: bool) -> Self {
        Self {
            x0: x0.to_vec(),
            f_star,
            keep_iterates,
            records: Vec::new(),
            iterates: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        k: usize,
        x: &[f64],
        f: f64,
        exact_grad: &[f64],
        tilde_grad: &[f64],
        l_k: Option<f64>,
        inner_evals: Option<usize>,
    ) {
        self.records.push(IterationRecord {
            k,
            f_gap: f - self.f_star.unwrap_or(0.0),
            exact_grad_norm: vector::norm(exact_grad),
            tilde_grad_norm: vector::norm(tilde_grad),
            dist_from_x0: vector::dist(x, &self.x0),
            l_k,
            inner_evals,
        });
        if self.keep_iterates {
            self.iterates.push(x.to_vec());
        }
    }

    fn finish(
        self,
        stop_reason: StopReason,
        x_hat: Vector,
        value_queries: usize,
        grad_queries: usize,
    ) -> RunResult {
        RunResult {
            records: self.records,
            stop_reason,
            x_hat,
            total_value_queries: value_queries,
            total_grad_queries: grad_queries,
            f_star: self.f_star,
            iterates: self.iterates,
        }
    }
}

fn validate_start(x0: &[f64], dim: usize) -> Result<(), ConfigError> {
    if x0.len() != dim {
        return Err(ConfigError::Invalid(format!(
            "x0 has length {}, objective dimension is {dim}",
            x0.len()
        )));
    }
    if !vector::is_finite(x0) {
        return Err(ConfigError::Invalid("x0 must be finite".into()));
    }
    Ok(())
}

fn overflow(
    recorder: Recorder,
    iteration: usize,
    last_finite: &[f64],
    value_queries: usize,
    grad_queries: usize,
) -> SolverError {
    let run = recorder.finish(
        StopReason::GradientOverflow,
        last_finite.to_vec(),
        value_queries,
        grad_queries,
    );
    SolverError::GradientOverflow {
        iteration,
        last_finite: last_finite.to_vec(),
        run: Box::new(run),
    }
}

fn oracle_failure(
    err: OracleError,
    recorder: Recorder,
    iteration: usize,
    x: &[f64],
    value_queries: usize,
    grad_queries: usize,
) -> SolverError {
    match err {
        OracleError::NonFiniteGradient { .. } => {
            overflow(recorder, iteration, x, value_queries, grad_queries)
        }
        other => SolverError::Oracle(other),
    }
}
