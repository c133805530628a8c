//! One solver run on one problem instance, with bounds and certificates attached.

use std::time::{Duration, Instant};

use inexact_gd_core::solvers::StopCriterion;
use inexact_gd_core::theory::{bounds_report, verify_certificates, CertificateMode};
use inexact_gd_core::{
    run_adaptive_gd, run_const_step_gd, vector, AdaptiveConfig, BoundsReport, CertificateReport,
    ConstStepConfig, InexactOracle, Objective, RunResult, SolverError, StopReason, StopRule,
    TheoryInputs,
};
use serde::Serialize;

use crate::output::num;
use crate::problem::{oracle_stream, Instance};
use crate::spec::{ExperimentSpec, SolverKind, StopKind};
use crate::UsageError;

/// Iterates are only recorded when the trajectory fits in this many floats.
const MAX_RECORDED_FLOATS: usize = 20_000_000;

#[derive(Debug)]
pub enum RunError {
    Usage(UsageError),
    Solver(SolverError),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(e) => e.fmt(f),
            RunError::Solver(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for RunError {}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> Self {
        RunError::Usage(e)
    }
}

impl From<inexact_gd_core::ConfigError> for RunError {
    fn from(e: inexact_gd_core::ConfigError) -> Self {
        RunError::Usage(UsageError(e.to_string()))
    }
}

pub fn stop_rule(kind: StopKind, max_iters: usize) -> StopRule {
    let criterion = match kind {
        StopKind::ConstRule => StopCriterion::Const,
        StopKind::AdaptiveRule => StopCriterion::Adaptive,
        StopKind::None => StopCriterion::None,
    };
    StopRule::new(criterion, max_iters)
}

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: RunResult,
    /// The iterate left the floating-point range; `run` ends at the last finite iterate.
    pub overflow: bool,
    /// `f*`, exact or estimated, used for gaps in reports.
    pub f_star: Option<f64>,
    pub bounds: Option<BoundsReport>,
    pub certificate: Option<CertificateReport>,
    pub warnings: Vec<String>,
    pub elapsed: Duration,
}

impl RunOutcome {
    pub fn final_gap(&self) -> Option<f64> {
        let f = self.run.last().f_gap + self.run.f_star.unwrap_or(0.0);
        self.f_star.map(|fs| f - fs)
    }

    pub fn grad_ratio(&self, delta: f64) -> f64 {
        self.run.last().exact_grad_norm / delta
    }

    pub fn triggered(&self) -> bool {
        self.run.stop_reason == StopReason::RuleTriggered
    }

    pub fn summary(&self, delta: f64) -> RunSummary {
        let last = self.run.last();
        RunSummary {
            stop_reason: stop_reason_name(self.run.stop_reason).to_string(),
            n: self.run.iterations(),
            f_gap: self.final_gap(),
            grad_ratio: (delta > 0.0).then(|| self.grad_ratio(delta)),
            exact_grad_norm: last.exact_grad_norm,
            dist_from_x0: last.dist_from_x0,
            grad_queries: self.run.total_grad_queries,
            value_queries: self.run.total_value_queries,
            candidate_trials: self.run.candidate_trials(),
            max_accepted_l: self.run.max_accepted_l(),
        }
    }
}

pub fn stop_reason_name(r: StopReason) -> &'static str {
    match r {
        StopReason::RuleTriggered => "rule-triggered",
        StopReason::MaxIters => "max-iters",
        StopReason::GradientOverflow => "overflow",
    }
}

/// Condensed result for printing and JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub stop_reason: String,
    pub n: usize,
    pub f_gap: Option<f64>,
    pub grad_ratio: Option<f64>,
    pub exact_grad_norm: f64,
    pub dist_from_x0: f64,
    pub grad_queries: usize,
    pub value_queries: usize,
    pub candidate_trials: usize,
    pub max_accepted_l: Option<f64>,
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"));
        write!(
            f,
            "stop={} N={} f_gap={} |grad f|/delta={} |x_N-x0|={:.6e}",
            self.stop_reason,
            self.n,
            opt(self.f_gap),
            opt(self.grad_ratio),
            self.dist_from_x0
        )
    }
}

/// Options that differ between single runs and table cells.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub solver: SolverKind,
    pub stop: StopKind,
    pub max_iters: usize,
    /// Record iterates and replay the certificates.
    pub certify: bool,
}

impl RunOptions {
    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        RunOptions {
            solver: spec.solver,
            stop: spec.stop,
            max_iters: spec.max_iters,
            certify: true,
        }
    }
}

/// Runs the configured solver on a prepared instance.
///
/// `f_star` overrides the problem's own `f*` for reports (used for estimated optima).
pub fn run_instance(
    spec: &ExperimentSpec,
    inst: &Instance,
    trial: usize,
    opts: RunOptions,
    f_star: Option<f64>,
) -> Result<RunOutcome, RunError> {
    let noise = inst.noise_model(&spec.noise)?;
    let mut oracle = InexactOracle::new(
        inst.problem.clone(),
        spec.delta,
        spec.small_delta,
        noise,
        oracle_stream(spec.seed, trial),
    )?;
    let dim = inst.problem.dim();
    // Rule-stopped runs are short; uncapped ones only record when the cap keeps them small.
    let keep = opts.certify
        && (opts.stop != StopKind::None
            || dim.saturating_mul(opts.max_iters.saturating_add(1)) <= MAX_RECORDED_FLOATS);
    let rule = stop_rule(opts.stop, opts.max_iters);
    let mut warnings = Vec::new();

    let start = Instant::now();
    let result = match opts.solver {
        SolverKind::Const => {
            let l = inst.step_l.ok_or_else(|| {
                UsageError(format!("{} needs --L for the constant-step solver", spec.problem))
            })?;
            let cfg = ConstStepConfig::new(l, inst.x0.clone())
                .with_stop(rule)
                .with_keep_iterates(keep);
            run_const_step_gd(&mut oracle, &cfg)
        }
        SolverKind::Adaptive => {
            let cfg = AdaptiveConfig::new(spec.l0, spec.l_min, inst.x0.clone())
                .with_stop(rule)
                .with_keep_iterates(keep);
            run_adaptive_gd(&mut oracle, &cfg)
        }
    };
    let elapsed = start.elapsed();
    let (run, overflow) = match result {
        Ok(run) => (run, false),
        Err(SolverError::GradientOverflow { run, iteration, last_finite }) => {
            warnings.push(format!(
                "numeric overflow at iteration {iteration}; last finite iterate norm {:.6e}",
                vector::norm(&last_finite)
            ));
            (*run, true)
        }
        Err(e) => return Err(RunError::Solver(e)),
    };

    let f_star = f_star.or_else(|| inst.problem.f_star());
    let gap0 = f_star.map(|fs| (inst.problem.value(&inst.x0) - fs).max(0.0));
    let theory = |l: f64| {
        let mut inp = TheoryInputs::new(l, spec.delta, gap0.unwrap_or(0.0))
            .with_small_delta(spec.small_delta);
        if let Some(mu) = inst.mu {
            inp = inp.with_mu(mu);
        }
        if opts.solver == SolverKind::Adaptive && spec.l_min > 0.0 && spec.l_min <= l {
            inp = inp.with_l_min(spec.l_min);
        }
        inp
    };

    let bounds = match (inst.step_l, gap0) {
        (Some(l), Some(_)) => bounds_report(&theory(l), None).ok(),
        _ => None,
    };
    if opts.solver == SolverKind::Adaptive && spec.small_delta > 0.0 {
        if let Some(l) = inst.step_l {
            if spec.delta * spec.delta <= 16.0 * l * spec.small_delta {
                warnings.push(format!(
                    "value noise δ = {} violates Δ² > 16Lδ; the Δ-dependent adaptive budget does not apply",
                    num(spec.small_delta)
                ));
            }
        }
    }

    let certificate = if keep && !run.iterates.is_empty() {
        let (mode, l) = match opts.solver {
            SolverKind::Const => (CertificateMode::Const, inst.step_l),
            // Adaptive checks use the realized L_k; L only has to pass validation.
            SolverKind::Adaptive => (CertificateMode::Adaptive, Some(inst.step_l.unwrap_or(spec.l0))),
        };
        l.and_then(|l| verify_certificates(&run, &inst.problem, &theory(l), mode).ok())
    } else {
        None
    };

    Ok(RunOutcome {
        run,
        overflow,
        f_star,
        bounds,
        certificate,
        warnings,
        elapsed,
    })
}

/// Builds the instance for `trial` and runs it with the settings of `spec`.
pub fn execute(spec: &ExperimentSpec, trial: usize) -> Result<(Instance, RunOutcome), RunError> {
    let inst = Instance::build(spec, trial)?;
    let out = run_instance(spec, &inst, trial, RunOptions::from_spec(spec), None)?;
    Ok((inst, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{NoiseKind, Overrides, ProblemKind};

    #[test]
    fn exact_quadratic_reaches_tiny_gap() {
        let spec = ExperimentSpec::resolve(&Overrides {
            n: Some(3),
            k: Some(1),
            delta: Some(0.0),
            noise: Some(NoiseKind::None),
            ..Default::default()
        })
        .unwrap();
        let (_, out) = execute(&spec, 0).unwrap();
        assert!(out.triggered());
        assert!(out.final_gap().unwrap() <= 1e-20);
        assert!(out.certificate.unwrap().verdict);
    }

    #[test]
    fn simple3d_stops_immediately() {
        let spec = ExperimentSpec::resolve(&Overrides {
            problem: Some(ProblemKind::Simple3d),
            ..Default::default()
        })
        .unwrap();
        let (_, out) = execute(&spec, 0).unwrap();
        assert!(out.triggered());
        assert_eq!(out.run.iterations(), 0);
    }
}
