use alloc::format;

use super::{oracle_failure, overflow, validate_start, Recorder, RunResult, StopReason, StopRule};
use crate::error::{ConfigError, SolverError};
use crate::objective::Objective;
use crate::oracle::InexactOracle;
use crate::vector::{self, Vector};

/// Gradient descent `x_{k+1} = x_k − ∇̃f(x_k)/L`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstStepConfig {
    /// Step constant; the step size is `1/L`.
    pub l: f64,
    pub x0: Vector,
    pub stop: StopRule,
    /// Store every iterate in the result (needed for certificates).
    pub keep_iterates: bool,
}

impl ConstStepConfig {
    pub fn new(l: f64, x0: Vector) -> Self {
        Self {
            l,
            x0,
            stop: StopRule::const_rule(),
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

/// Runs constant-step gradient descent on the oracle's objective.
///
/// Each iteration makes one gradient query. The record for `x_k` is written before the stopping
/// rule is tested, so a run that stops at `x_N` has `N + 1` records and `x̂ = x_N`.
pub fn run_const_step_gd<O: Objective>(
    oracle: &mut InexactOracle<O>,
    cfg: &ConstStepConfig,
) -> Result<RunResult, SolverError> {
    if !(cfg.l.is_finite() && cfg.l > 0.0) {
        return Err(ConfigError::Invalid(format!("L must be finite and > 0, got {}", cfg.l)).into());
    }
    cfg.stop.validate()?;
    validate_start(&cfg.x0, oracle.objective().dim())?;

    let delta = oracle.delta();
    let mut rec = Recorder::new(&cfg.x0, oracle.objective().f_star(), cfg.keep_iterates);
    let mut x = cfg.x0.clone();
    let inv_l = 1.0 / cfg.l;
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
        rec.push(k, &x, f, &sample.exact, &sample.inexact, None, None);

        if cfg.stop.criterion.is_met(&sample.inexact, delta) {
            let (v, g) = (oracle.value_queries(), oracle.grad_queries());
            return Ok(rec.finish(StopReason::RuleTriggered, x, v, g));
        }
        if k >= cfg.stop.max_iters {
            let (v, g) = (oracle.value_queries(), oracle.grad_queries());
            return Ok(rec.finish(StopReason::MaxIters, x, v, g));
        }

        let mut next = x.clone();
        vector::axpy(-inv_l, &sample.inexact, &mut next);
        if !vector::is_finite(&next) {
            let (v, g) = (oracle.value_queries(), oracle.grad_queries());
            return Err(overflow(rec, k + 1, &x, v, g));
        }
        x = next;
        k += 1;
    }
}
