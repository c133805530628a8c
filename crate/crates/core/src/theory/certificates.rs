//! Post-hoc replay of a trajectory against the descent inequalities.
//!
//! Values and gradients are recomputed exactly at the stored iterates; only `‖∇̃f(x_k)‖` and
//! `L_k` come from the run records. Each check yields one flag per record index. Step
//! inequalities for `x_k → x_{k+1}` are stored at the arrival index `k + 1`, so a bad iterate is
//! flagged where it appears.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::TheoryInputs;
use crate::error::TheoryError;
use crate::objective::Objective;
use crate::solvers::{RunResult, StopReason};
use crate::vector;

/// Additive slack `1e-10·(1 + |f|)` for cancellation in large values.
pub const CERTIFICATE_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertificateMode {
    /// Step `1/L` with `L` the true smoothness constant.
    Const,
    /// Backtracking with the accepted `L_k` from the records.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateCheck {
    pub name: String,
    /// One flag per record index.
    pub passed: Vec<bool>,
    /// Largest excess over the right-hand side plus tolerance; zero when every flag passes.
    pub worst_violation: f64,
    pub first_failure: Option<usize>,
}

impl CertificateCheck {
    fn new(name: &str, len: usize) -> Self {
        Self {
            name: name.into(),
            passed: vec![true; len],
            worst_violation: 0.0,
            first_failure: None,
        }
    }

    /// Records `lhs ≤ rhs + tol` at index `i`.
    fn record(&mut self, i: usize, lhs: f64, rhs: f64, tol: f64) {
        let excess = lhs - (rhs + tol);
        // NaN on either side counts as a failure.
        if excess > 0.0 || excess.is_nan() {
            self.passed[i] = false;
            let v = if excess.is_nan() { f64::INFINITY } else { excess };
            self.worst_violation = self.worst_violation.max(v);
            if self.first_failure.is_none() {
                self.first_failure = Some(i);
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateReport {
    pub mode: CertificateMode,
    pub checks: Vec<CertificateCheck>,
    pub worst_violation: f64,
    pub verdict: bool,
}

impl CertificateReport {
    fn from_checks(mode: CertificateMode, checks: Vec<CertificateCheck>) -> Self {
        let worst_violation = checks.iter().map(|c| c.worst_violation).fold(0.0, f64::max);
        let verdict = checks.iter().all(CertificateCheck::ok);
        Self {
            mode,
            checks,
            worst_violation,
            verdict,
        }
    }

    /// Record indices flagged by any check, ascending.
    pub fn flagged_indices(&self) -> Vec<usize> {
        let len = self.checks.first().map_or(0, |c| c.passed.len());
        (0..len)
            .filter(|&i| self.checks.iter().any(|c| !c.passed[i]))
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&CertificateCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn tol(f: f64) -> f64 {
    CERTIFICATE_RTOL * (1.0 + f.abs())
}

/// Replays `run` against the inequalities of the chosen method.
///
/// Constant-step mode, with `L = inp.l`:
/// * `descent_inexact`: `f_{k+1} − f_k ≤ Δ²/L − ‖∇̃f_k‖²/(4L)`
/// * `descent_exact`: `f_{k+1} − f_k ≤ Δ²/(2L) − ‖∇f_k‖²/(2L)`
/// * `min_gradient`: `min_{k<n} ‖∇f_k‖ ≤ Δ + √(2L(f_0 − f_n)/n)`
/// * `linear_decay` (needs `μ`, `f*`): `f_k − f* ≤ (1 − μ/L)^k·gap0 + Δ²/(2μ)`
/// * `distance` (needs `μ`, `f*`):
///   `‖x_n − x_0‖ ≤ 2nΔ√(1/L² + 1/(μL)) + 2√(gap0/L)·Σ_{k<n} (1 − μ/L)^{k/2}`
/// * `stop_gap` (needs `μ`, `f*`, a triggered rule): `f(x̂) − f* ≤ 7Δ²/μ`
///
/// Adaptive mode:
/// * `descent_adaptive`: `f_{k+1} − f_k ≤ Δ²/(2L_k) − ‖∇̃f_k‖²/(4L_k) + 4δ`
/// * `decay_with_floor` (needs `μ`, `f*`): `f_k − f* ≤ B_k` with `B_0 = gap0` and
///   `B_{k+1} = max(0, 1 − μ/(4L_k))·B_k + 3Δ²/(4L_k) + 4δ`
/// * `stop_gap` (needs `μ`, `f*`, a triggered rule): `f(x̂) − f* ≤ 5Δ²/μ` after the adaptive rule,
///   `7Δ²/μ` after the constant-step rule
///
/// `gap0` is recomputed as `f(x_0) − f*` when the problem knows `f*`.
pub fn verify_certificates<O: Objective + ?Sized>(
    run: &RunResult,
    problem: &O,
    inp: &TheoryInputs,
    mode: CertificateMode,
) -> Result<CertificateReport, TheoryError> {
    inp.validate()?;
    let n = run.records.len();
    if run.iterates.is_empty() || run.iterates.len() != n {
        return Err(TheoryError::MissingTrajectory);
    }
    let dim = problem.dim();
    if let Some(bad) = run.iterates.iter().find(|x| x.len() != dim) {
        return Err(TheoryError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }

    let mut f = Vec::with_capacity(n);
    let mut grad_norm = Vec::with_capacity(n);
    for x in &run.iterates {
        let (v, g) = problem.value_and_gradient(x);
        f.push(v);
        grad_norm.push(vector::norm(&g));
    }
    let tilde: Vec<f64> = run.records.iter().map(|r| r.tilde_grad_norm).collect();
    let f_star = problem.f_star();
    let gap0 = f_star.map_or(inp.gap0, |fs| f[0] - fs);
    let mu = inp.mu;
    let triggered = run.stop_reason == StopReason::RuleTriggered;
    let d2 = inp.delta * inp.delta;
    let l = inp.l;

    let checks = match mode {
        CertificateMode::Const => {
            let mut inexact = CertificateCheck::new("descent_inexact", n);
            let mut exact = CertificateCheck::new("descent_exact", n);
            let mut min_grad = CertificateCheck::new("min_gradient", n);
            let mut running_min = f64::INFINITY;
            for i in 1..n {
                let df = f[i] - f[i - 1];
                let t = tol(f[i - 1]);
                inexact.record(i, df, d2 / l - tilde[i - 1] * tilde[i - 1] / (4.0 * l), t);
                exact.record(i, df, d2 / (2.0 * l) - grad_norm[i - 1].powi(2) / (2.0 * l), t);
                running_min = running_min.min(grad_norm[i - 1]);
                let drop = (f[0] - f[i]).max(0.0);
                let rhs = inp.delta + (2.0 * l * drop / i as f64).sqrt();
                min_grad.record(i, running_min, rhs, CERTIFICATE_RTOL * (1.0 + rhs));
            }
            let mut checks = vec![inexact, exact, min_grad];
            if let (Some(mu), Some(fs)) = (mu, f_star) {
                let q = (1.0 - mu / l).max(0.0);
                let mut decay = CertificateCheck::new("linear_decay", n);
                let mut dist = CertificateCheck::new("distance", n);
                let floor = d2 / (2.0 * mu);
                let step_noise = 2.0 * inp.delta * (1.0 / (l * l) + 1.0 / (mu * l)).sqrt();
                let sqrt_gap = (gap0 / l).sqrt();
                let mut qk = 1.0;
                let mut geo_sum = 0.0;
                for i in 0..n {
                    decay.record(i, f[i] - fs, qk * gap0 + floor, tol(f[i]));
                    let r = vector::dist(&run.iterates[i], &run.iterates[0]);
                    let rhs = i as f64 * step_noise + 2.0 * sqrt_gap * geo_sum;
                    dist.record(i, r, rhs, CERTIFICATE_RTOL * (1.0 + rhs));
                    geo_sum += qk.sqrt();
                    qk *= q;
                }
                checks.push(decay);
                checks.push(dist);
                if triggered {
                    let mut stop = CertificateCheck::new("stop_gap", n);
                    stop.record(n - 1, f[n - 1] - fs, 7.0 * d2 / mu, tol(f[n - 1]));
                    checks.push(stop);
                }
            }
            checks
        }
        CertificateMode::Adaptive => {
            let four_delta = 4.0 * inp.small_delta;
            let mut l_ks = Vec::with_capacity(n.saturating_sub(1));
            for r in &run.records[..n - 1] {
                match r.l_k {
                    Some(lk) if lk > 0.0 => l_ks.push(lk),
                    _ => {
                        return Err(TheoryError::InvalidInput(format!(
                            "record {} has no accepted step constant",
                            r.k
                        )))
                    }
                }
            }
            let mut step = CertificateCheck::new("descent_adaptive", n);
            for i in 1..n {
                let lk = l_ks[i - 1];
                let rhs = d2 / (2.0 * lk) - tilde[i - 1] * tilde[i - 1] / (4.0 * lk) + four_delta;
                step.record(i, f[i] - f[i - 1], rhs, tol(f[i - 1]));
            }
            let mut checks = vec![step];
            if let (Some(mu), Some(fs)) = (mu, f_star) {
                let mut decay = CertificateCheck::new("decay_with_floor", n);
                let mut b = gap0;
                for i in 0..n {
                    decay.record(i, f[i] - fs, b, tol(f[i]));
                    if i + 1 < n {
                        let lk = l_ks[i];
                        b = (1.0 - mu / (4.0 * lk)).max(0.0) * b + 3.0 * d2 / (4.0 * lk) + four_delta;
                    }
                }
                checks.push(decay);
                if triggered {
                    let mut stop = CertificateCheck::new("stop_gap", n);
                    // A run stopped by the looser constant-step rule only earns that rule's gap.
                    let c = if tilde[n - 1] <= 2.0 * inp.delta { 5.0 } else { 7.0 };
                    stop.record(n - 1, f[n - 1] - fs, c * d2 / mu, tol(f[n - 1]));
                    checks.push(stop);
                }
            }
            checks
        }
    };
    Ok(CertificateReport::from_checks(mode, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseModel;
    use crate::oracle::InexactOracle;
    use crate::problems::QuadraticDiag;
    use crate::rng::RngStream;
    use crate::solvers::{run_adaptive_gd, run_const_step_gd, AdaptiveConfig, ConstStepConfig};

    fn quad() -> QuadraticDiag {
        QuadraticDiag::new(vec![0.0, 0.2, 0.5, 1.0]).unwrap()
    }

    fn x0() -> Vec<f64> {
        vec![1.0, 3.0, -2.0, 4.0]
    }

    #[test]
    fn exact_runs_pass_with_zero_violation() {
        let q = quad();
        let gap0 = q.value(&x0());
        let inp = TheoryInputs::new(1.0, 0.0, gap0).with_mu(0.2);
        let mut o = InexactOracle::exact(q.clone());
        let cfg = ConstStepConfig::new(1.0, x0())
            .with_stop(crate::solvers::StopRule::none(200));
        let run = run_const_step_gd(&mut o, &cfg).unwrap();
        let rep = verify_certificates(&run, &q, &inp, CertificateMode::Const).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.worst_violation, 0.0);

        let mut o = InexactOracle::exact(q.clone());
        let cfg = AdaptiveConfig::new(1.0, 0.05, x0()).with_stop(crate::solvers::StopRule::none(200));
        let run = run_adaptive_gd(&mut o, &cfg).unwrap();
        let rep = verify_certificates(&run, &q, &inp, CertificateMode::Adaptive).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.worst_violation, 0.0);
    }

    #[test]
    fn noisy_runs_pass() {
        let q = quad();
        let delta = 1e-3;
        let gap0 = q.value(&x0());
        for seed in 0..5 {
            let inp = TheoryInputs::new(1.0, delta, gap0)
                .with_mu(0.2)
                .with_small_delta(delta * delta / 16.0);
            let mut o = InexactOracle::new(
                q.clone(),
                delta,
                inp.small_delta,
                NoiseModel::RandomSphere,
                RngStream::new(seed, 0),
            )
            .unwrap();
            let run = run_const_step_gd(&mut o, &ConstStepConfig::new(1.0, x0())).unwrap();
            let rep = verify_certificates(&run, &q, &inp, CertificateMode::Const).unwrap();
            assert!(rep.verdict, "{rep:?}");
            assert!(rep.check("stop_gap").is_some());

            let mut o = InexactOracle::new(
                q.clone(),
                delta,
                inp.small_delta,
                NoiseModel::Antigradient,
                RngStream::new(seed, 1),
            )
            .unwrap();
            let run = run_adaptive_gd(&mut o, &AdaptiveConfig::new(1.0, 0.05, x0())).unwrap();
            let rep = verify_certificates(&run, &q, &inp, CertificateMode::Adaptive).unwrap();
            assert!(rep.verdict, "{rep:?}");
        }
    }

    #[test]
    fn perturbed_iterate_is_flagged_at_its_index() {
        let q = quad();
        let gap0 = q.value(&x0());
        let inp = TheoryInputs::new(1.0, 1e-3, gap0).with_mu(0.2);
        let mut o =
            InexactOracle::new(q.clone(), 1e-3, 0.0, NoiseModel::RandomSphere, RngStream::new(4, 0))
                .unwrap();
        let mut run = run_const_step_gd(&mut o, &ConstStepConfig::new(1.0, x0())).unwrap();
        let j = run.iterates.len() / 2;
        for c in run.iterates[j].iter_mut() {
            *c += 1.0;
        }
        let rep = verify_certificates(&run, &q, &inp, CertificateMode::Const).unwrap();
        assert!(!rep.verdict);
        assert!(rep.worst_violation > 0.0);
        assert_eq!(rep.flagged_indices().first(), Some(&j));
    }

    #[test]
    fn requires_iterates_and_matching_dimension() {
        let q = quad();
        let mut o = InexactOracle::exact(q.clone());
        let cfg = ConstStepConfig::new(1.0, x0()).with_keep_iterates(false);
        let run = run_const_step_gd(&mut o, &cfg).unwrap();
        let inp = TheoryInputs::new(1.0, 0.0, 1.0);
        assert_eq!(
            verify_certificates(&run, &q, &inp, CertificateMode::Const),
            Err(TheoryError::MissingTrajectory)
        );
        let other = QuadraticDiag::new(vec![1.0, 1.0]).unwrap();
        let mut o = InexactOracle::exact(q.clone());
        let run = run_const_step_gd(&mut o, &ConstStepConfig::new(1.0, x0())).unwrap();
        assert!(matches!(
            verify_certificates(&run, &other, &inp, CertificateMode::Const),
            Err(TheoryError::DimensionMismatch { expected: 2, got: 4 })
        ));
    }
}
