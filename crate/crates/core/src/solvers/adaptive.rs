use alloc::format;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::{oracle_failure, overflow, validate_start, Recorder, RunResult, StopReason, StopRule};
use crate::error::{ConfigError, SolverError};
use crate::objective::Objective;
use crate::oracle::InexactOracle;
use crate::vector::{self, Vector};

/// Doublings allowed past `max(L0, 1)` before the inner loop is declared divergent.
const DIVERGENCE_EXPONENT: i32 = 32;

/// Gradient descent with a backtracking estimate `L_k` of the smoothness constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdaptiveConfig {
    /// Floor for the estimate after each halving.
    pub l_min: f64,
    /// Initial estimate.
    pub l0: f64,
    pub x0: Vector,
    pub stop: StopRule,
    pub keep_iterates: bool,
}

impl AdaptiveConfig {
    pub fn new(l0: f64, l_min: f64, x0: Vector) -> Self {
        Self {
            l_min,
            l0,
            x0,
            stop: StopRule::adaptive_rule(),
            keep_iterates: true,
        }
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_keep_iterates(mut self, keep: bool) -> Self {
        self.keep_iterates = keep;
        self
    }
}

/// Runs adaptive gradient descent on the oracle's objective.
///
/// At `x_k` the method queries `∇̃f(x_k)`, tests the stopping rule, then queries `f̃(x_k)` once
/// and tries candidates `x_k − ∇̃f(x_k)/(2L_k)`, doubling `L_k` until
///
/// `f̃(x_{k+1}) ≤ f̃(x_k) + ⟨∇̃f(x_k), x_{k+1} − x_k⟩ + L_k‖x_{k+1} − x_k‖² + Δ²/(2L_k) + 2δ`.
///
/// The next iteration starts from `max(L_k/2, L_min)`. Record `k` carries the accepted `L_k`
/// and the number of candidates tried; the final record carries neither.
pub fn run_adaptive_gd<O: Objective>(
    oracle: &mut InexactOracle<O>,
    cfg: &AdaptiveConfig,
) -> Result<RunResult, SolverError> {
    if !(cfg.l0.is_finite() && cfg.l0 > 0.0) {
        return Err(ConfigError::Invalid(format!("L0 must be finite and > 0, got {}", cfg.l0)).into());
    }
    if !(cfg.l_min.is_finite() && cfg.l_min >= 0.0 && cfg.l_min <= cfg.l0) {
        return Err(ConfigError::Invalid(format!(
            "L_min must satisfy 0 ≤ L_min ≤ L0, got L_min = {}, L0 = {}",
            cfg.l_min, cfg.l0
        ))
        .into());
    }
    cfg.stop.validate()?;
    validate_start(&cfg.x0, oracle.objective().dim())?;

    let delta = oracle.delta();
    let slack_const = delta * delta / 2.0;
    let slack_value = 2.0 * oracle.small_delta();
    let cap = 2.0f64.powi(DIVERGENCE_EXPONENT) * cfg.l0.max(1.0);

    let mut rec = Recorder::new(&cfg.x0, oracle.objective().f_star(), cfg.keep_iterates);
    let mut x = cfg.x0.clone();
    let mut l_k = cfg.l0;
    let mut k = 0usize;
    loop {
        let sample = match oracle.query_gradient(&x) {
            Ok(s) => s,
            Err(e) => {
                let (v, g) = (oracle.value_queries(), oracle.grad_queries());
                return Err(oracle_failure(e, rec, k, &x, v, g));
            }
        };
        let f = oracle.exact_value(&x);
        let g = &sample.inexact;

        if cfg.stop.criterion.is_met(g, delta) || k >= cfg.stop.max_iters {
            let reason = if cfg.stop.criterion.is_met(g, delta) {
                StopReason::RuleTriggered
            } else {
                StopReason::MaxIters
            };
            rec.push(k, &x, f, &sample.exact, g, None, None);
            let (v, gq) = (oracle.value_queries(), oracle.grad_queries());
            return Ok(rec.finish(reason, x, v, gq));
        }

        let f_tilde = oracle.inexact_value(&x);
        let mut trials = 0usize;
        let candidate = loop {
            trials += 1;
            let mut cand = x.clone();
            vector::axpy(-0.5 / l_k, g, &mut cand);
            if !vector::is_finite(&cand) {
                let (v, gq) = (oracle.value_queries(), oracle.grad_queries());
                return Err(overflow(rec, k + 1, &x, v, gq));
            }
            let f_cand = oracle.inexact_value(&cand);
            let step: Vector = cand.iter().zip(&x).map(|(c, xi)| c - xi).collect();
            let rhs = f_tilde
                + vector::dot(g, &step)
                + l_k * vector::norm_sq(&step)
                + slack_const / l_k
                + slack_value;
            if f_cand <= rhs {
                break cand;
            }
            l_k *= 2.0;
            if l_k > cap {
                return Err(SolverError::InnerLoopDivergence { iteration: k, l_k });
            }
        };

        rec.push(k, &x, f, &sample.exact, g, Some(l_k), Some(trials));
        x = candidate;
        l_k = (l_k / 2.0).max(cfg.l_min);
        k += 1;
    }
}
