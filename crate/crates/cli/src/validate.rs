//! Invariant suite behind the `validate` command.

use std::path::Path;

use inexact_gd_core::problems::{
    LogRegData, LogisticRegression, NesterovSkokov, QuadraticDiag, Rosenbrock, Simple3D,
};
use inexact_gd_core::theory::{verify_certificates, CertificateMode};
use inexact_gd_core::{
    gradient_check, run_adaptive_gd, run_const_step_gd, sample_unit_sphere, vector,
    AdaptiveConfig, ConstStepConfig, InexactOracle, NoiseModel, Objective, RngStream, StopRule,
    TheoryInputs,
};

use crate::output::{self, num};

pub const FD_TOL: f64 = 1e-6;
const FD_POINTS: usize = 20;
const ORACLE_QUERIES: usize = 10_000;
const MINOR_RTOL: f64 = 1e-8;

/// One line of the pass/fail table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: String,
    pub subject: String,
    pub passed: bool,
    /// Largest observed error, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub results: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.results.iter().filter(|r| !r.passed).collect()
    }

    pub fn table(&self) -> String {
        let mut s = format!("{:<6} {:<22} {:<28} {:>12} {:>10}\n", "result", "check", "subject", "worst", "tolerance");
        for r in &self.results {
            s.push_str(&format!(
                "{:<6} {:<22} {:<28} {:>12.3e} {:>10.1e}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.check,
                r.subject,
                r.worst,
                r.tolerance
            ));
        }
        s
    }

    pub fn write_csv(&self, path: &Path, header: &[String]) -> std::io::Result<()> {
        let rows = self.results.iter().map(|r| {
            vec![
                r.check.clone(),
                r.subject.clone(),
                if r.passed { "pass".into() } else { "fail".into() },
                num(r.worst),
                num(r.tolerance),
            ]
        });
        output::write_csv(path, header, &["check", "subject", "result", "worst", "tolerance"], rows)
    }

    fn push(&mut self, check: &str, subject: &str, worst: f64, tolerance: f64) {
        self.results.push(CheckResult {
            check: check.into(),
            subject: subject.into(),
            passed: worst <= tolerance,
            worst,
            tolerance,
        });
    }
}

/// An objective under test together with the box its sample points are drawn from.
pub struct NamedObjective {
    pub name: String,
    pub objective: Box<dyn Objective + Sync>,
    pub scale: f64,
}

impl NamedObjective {
    pub fn new(name: impl Into<String>, objective: impl Objective + Sync + 'static, scale: f64) -> Self {
        NamedObjective {
            name: name.into(),
            objective: Box::new(objective),
            scale,
        }
    }
}

/// The shipped problems at moderate sizes.
pub fn builtin_objectives(seed: u64) -> Vec<NamedObjective> {
    let mut rng = RngStream::new(seed, 1_000);
    let quad = QuadraticDiag::random(50, 5, 0.1, 1.0, &mut rng).expect("valid quadratic");
    let data = LogRegData::generate(20, 60, 4, &mut rng).expect("valid logreg data");
    vec![
        NamedObjective::new("quadratic", quad, 10.0),
        NamedObjective::new("simple3d", Simple3D::new(1.0, 0.1).expect("valid"), 10.0),
        NamedObjective::new("logreg", LogisticRegression::new(data), 2.0),
        NamedObjective::new("rosenbrock", Rosenbrock, 2.0),
        NamedObjective::new("nesterov-skokov", NesterovSkokov::new(7).expect("valid"), 1.5),
    ]
}

fn random_point(rng: &mut RngStream, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.uniform(-scale, scale)).collect()
}

fn gradient_checks(report: &mut ValidationReport, objectives: &[NamedObjective], seed: u64) {
    for (i, o) in objectives.iter().enumerate() {
        let mut rng = RngStream::new(seed, 2_000 + i as u64);
        let worst = (0..FD_POINTS)
            .map(|_| {
                let x = random_point(&mut rng, o.objective.dim(), o.scale);
                gradient_check(o.objective.as_ref(), &x).rel_error
            })
            .fold(0.0, f64::max);
        // NaN compares false, so map it to an obvious failure.
        report.push("finite-difference", &o.name, if worst.is_nan() { f64::INFINITY } else { worst }, FD_TOL);
    }
}

fn oracle_checks(report: &mut ValidationReport, seed: u64) {
    let mut rng = RngStream::new(seed, 3_000);
    let quad = QuadraticDiag::random(20, 2, 0.1, 1.0, &mut rng).expect("valid quadratic");
    let (delta, small) = (0.05, 1e-3);
    let ones = vec![1.0; 20];
    let models = [
        NoiseModel::None,
        NoiseModel::RandomSphere,
        NoiseModel::Antigradient,
        NoiseModel::constant(&ones).expect("nonzero"),
        NoiseModel::FirstComponentBias,
    ];
    for (i, model) in models.into_iter().enumerate() {
        let name = model.name();
        let mut oracle = InexactOracle::new(quad.clone(), delta, small, model, RngStream::new(seed, 3_100 + i as u64))
            .expect("valid oracle");
        let (mut worst_g, mut worst_f) = (0.0f64, 0.0f64);
        for _ in 0..ORACLE_QUERIES {
            let x = random_point(&mut rng, 20, 5.0);
            let s = oracle.query_gradient(&x).expect("finite gradient");
            worst_g = worst_g.max(vector::dist(&s.exact, &s.inexact) / delta);
            worst_f = worst_f.max((oracle.inexact_value(&x) - quad.value(&x)).abs() / small);
        }
        report.push("oracle-gradient-bound", name, worst_g, 1.0);
        report.push("oracle-value-bound", name, worst_f, 1.0);
    }
}

fn sphere_checks(report: &mut ValidationReport, seed: u64) {
    let mut rng = RngStream::new(seed, 4_000);
    for dim in [1usize, 2, 3, 10, 100] {
        let worst = (0..1_000)
            .map(|_| (vector::norm(&sample_unit_sphere(dim, &mut rng).expect("dim ≥ 1")) - 1.0).abs())
            .fold(0.0, f64::max);
        report.push("sphere-norm", &format!("dim {dim}"), worst, 1e-12);
    }
}

fn certificate_checks(report: &mut ValidationReport, seed: u64) {
    let (mu, l, delta) = (0.1, 1.0, 1e-3);
    for trial in 0..3u64 {
        let mut rng = RngStream::new(seed, 5_000 + trial);
        let q = QuadraticDiag::random(30, 3, mu, l, &mut rng).expect("valid quadratic");
        let x0 = vec![10.0; 30];
        let gap0 = q.value(&x0);
        let small = delta * delta / (16.0 * l);
        let inp = TheoryInputs::new(l, delta, gap0).with_mu(mu).with_small_delta(small);

        let mut o = InexactOracle::new(q.clone(), delta, small, NoiseModel::RandomSphere, RngStream::new(seed, 5_100 + trial))
            .expect("valid oracle");
        let cfg = ConstStepConfig::new(l, x0.clone()).with_stop(StopRule::const_rule());
        let subject = format!("quadratic const #{trial}");
        match run_const_step_gd(&mut o, &cfg)
            .ok()
            .and_then(|run| verify_certificates(&run, &q, &inp, CertificateMode::Const).ok())
        {
            Some(rep) => report.push("certificate-replay", &subject, rep.worst_violation, 0.0),
            None => report.push("certificate-replay", &subject, f64::INFINITY, 0.0),
        }

        let mut o = InexactOracle::new(q.clone(), delta, small, NoiseModel::RandomSphere, RngStream::new(seed, 5_200 + trial))
            .expect("valid oracle");
        let cfg = AdaptiveConfig::new(1.0, mu / 4.0, x0).with_stop(StopRule::adaptive_rule());
        let inp = inp.with_l_min(mu / 4.0);
        let subject = format!("quadratic adaptive #{trial}");
        match run_adaptive_gd(&mut o, &cfg)
            .ok()
            .and_then(|run| verify_certificates(&run, &q, &inp, CertificateMode::Adaptive).ok())
        {
            Some(rep) => report.push("certificate-replay", &subject, rep.worst_violation, 0.0),
            None => report.push("certificate-replay", &subject, f64::INFINITY, 0.0),
        }
    }
}

fn minor_checks(report: &mut ValidationReport, seed: u64) {
    for n in 2..=8usize {
        let ns = NesterovSkokov::new(n).expect("n ≥ 2");
        let mut rng = RngStream::new(seed, 6_000 + n as u64);
        // Every leading minor of JJᵀ equals det(J_k)² = 1/4.
        let worst = (0..100)
            .map(|_| {
                let x = random_point(&mut rng, n, 1.0);
                ns.minor_sequence(&x)
                    .iter()
                    .map(|m| (m - 0.25).abs() / 0.25)
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        report.push("minor-recursion", &format!("nesterov-skokov n={n}"), worst, MINOR_RTOL);
        let bad = (0..100)
            .filter(|_| !ns.minors_positive(&random_point(&mut rng, n, 1.5)))
            .count();
        report.push("minor-positivity", &format!("nesterov-skokov n={n}"), bad as f64, 0.0);
    }
}

/// Runs the full suite on the shipped problems plus `extra` objectives.
pub fn run_validation(seed: u64, extra: Vec<NamedObjective>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut objectives = builtin_objectives(seed);
    objectives.extend(extra);
    gradient_checks(&mut report, &objectives, seed);
    oracle_checks(&mut report, seed);
    sphere_checks(&mut report, seed);
    certificate_checks(&mut report, seed);
    minor_checks(&mut report, seed);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_problems_pass() {
        let rep = run_validation(0, Vec::new());
        assert!(rep.all_passed(), "{}", rep.table());
    }
}
