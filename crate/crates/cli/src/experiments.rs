//! Table sweeps and the logistic-regression experiment.
//!
//! Cells run in parallel; rows come back in grid order so files do not depend on scheduling.

use std::path::{Path, PathBuf};
use std::time::Duration;

use inexact_gd_core::{Objective, StopReason};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{self, num};
use crate::problem::Instance;
use crate::runner::{run_instance, stop_reason_name, RunError, RunOptions, RunOutcome};
use crate::spec::{ExperimentSpec, NoiseKind, Overrides, ProblemKind, SolverKind, StopKind};

pub const QUADRATIC_MU_GRID: [f64; 4] = [0.01, 0.1, 0.9, 0.99];
pub const QUADRATIC_DELTA_GRID: [f64; 3] = [1e-7, 1e-4, 1e-1];
pub const QUADRATIC_TRIALS: usize = 5;
pub const TABLE_DELTA_GRID: [f64; 3] = [1e-4, 1e-3, 1e-2];
pub const NS_N_GRID: [usize; 3] = [3, 5, 7];
pub const LOGREG_REF_ITERS: usize = 100_000;
pub const LOGREG_MAX_ITERS: usize = 100_000;

/// One table row: a single run inside a grid.
#[derive(Debug, Clone, Serialize)]
pub struct CellRow {
    pub problem: ProblemKind,
    pub solver: SolverKind,
    pub noise: String,
    pub n: usize,
    pub mu: Option<f64>,
    pub delta: f64,
    pub trial: usize,
    pub iterations: usize,
    pub stop_reason: String,
    pub n_star_const: Option<u64>,
    pub n_star_adaptive: Option<u64>,
    pub dist_from_x0: f64,
    pub dist_x0_to_solution: Option<f64>,
    pub grad_ratio: f64,
    pub f_gap: Option<f64>,
    /// Guaranteed gap of the active rule, `7Δ²/μ` or `5Δ²/μ`.
    pub gap_bound: Option<f64>,
    pub max_accepted_l: Option<f64>,
    pub candidate_trials: usize,
    pub grad_queries: usize,
    pub certificate_ok: Option<bool>,
    pub worst_violation: Option<f64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub const ROW_COLUMNS: [&str; 21] = [
    "problem",
    "solver",
    "noise",
    "n",
    "mu",
    "delta",
    "trial",
    "N",
    "stop_reason",
    "N_star_const",
    "N_star_adaptive",
    "dist_from_x0",
    "dist_x0_to_solution",
    "grad_ratio",
    "f_gap",
    "gap_bound",
    "max_L_k",
    "candidate_trials",
    "grad_queries",
    "certificate_ok",
    "worst_violation",
];

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl CellRow {
    fn from_outcome(spec: &ExperimentSpec, inst: &Instance, trial: usize, out: &RunOutcome) -> Self {
        let s = out.summary(spec.delta);
        let gap_bound = match (inst.mu, out.run.stop_reason) {
            (Some(mu), StopReason::RuleTriggered) => match spec.stop {
                StopKind::ConstRule => Some(7.0 * spec.delta * spec.delta / mu),
                StopKind::AdaptiveRule => Some(5.0 * spec.delta * spec.delta / mu),
                StopKind::None => None,
            },
            _ => None,
        };
        CellRow {
            problem: spec.problem,
            solver: spec.solver,
            noise: spec.noise.to_string(),
            n: inst.problem.dim(),
            mu: inst.mu,
            delta: spec.delta,
            trial,
            iterations: s.n,
            stop_reason: s.stop_reason,
            n_star_const: out.bounds.as_ref().and_then(|b| b.n_star_const),
            n_star_adaptive: out.bounds.as_ref().and_then(|b| b.n_star_adaptive),
            dist_from_x0: s.dist_from_x0,
            dist_x0_to_solution: inst.dist_to_solution(),
            grad_ratio: out.grad_ratio(spec.delta),
            f_gap: s.f_gap,
            gap_bound,
            max_accepted_l: s.max_accepted_l,
            candidate_trials: s.candidate_trials,
            grad_queries: s.grad_queries,
            certificate_ok: out.certificate.as_ref().map(|c| c.verdict),
            worst_violation: out.certificate.as_ref().map(|c| c.worst_violation),
            elapsed: out.elapsed,
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.problem.to_string(),
            self.solver.to_string(),
            self.noise.clone(),
            self.n.to_string(),
            cell(self.mu.map(num)),
            num(self.delta),
            self.trial.to_string(),
            self.iterations.to_string(),
            self.stop_reason.clone(),
            cell(self.n_star_const),
            cell(self.n_star_adaptive),
            num(self.dist_from_x0),
            cell(self.dist_x0_to_solution.map(num)),
            num(self.grad_ratio),
            cell(self.f_gap.map(num)),
            cell(self.gap_bound.map(num)),
            cell(self.max_accepted_l.map(num)),
            self.candidate_trials.to_string(),
            self.grad_queries.to_string(),
            cell(self.certificate_ok),
            cell(self.worst_violation.map(num)),
        ]
    }

    /// Human-readable line for stdout, including the wall-clock time.
    pub fn display_line(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |x| format!("{x:.3e}"));
        format!(
            "{:<8} {:<16} n={:<3} mu={:<6} delta={:<8.1e} trial={} N={:<7} |x_N-x0|={:<10.4} |grad|/delta={:<7.3} f_gap={:<10} cert={} time={:.1}ms",
            self.solver.to_string(),
            self.noise,
            self.n,
            self.mu.map_or_else(|| "-".into(), |m| m.to_string()),
            self.delta,
            self.trial,
            self.iterations,
            self.dist_from_x0,
            self.grad_ratio,
            opt(self.f_gap),
            self.certificate_ok.map_or("-", |ok| if ok { "ok" } else { "FAIL" }),
            self.elapsed.as_secs_f64() * 1e3,
        )
    }
}

/// One grid cell before execution: a resolved `ExperimentSpec` and which solvers to run on its instance.
#[derive(Debug, Clone)]
struct Cell {
    spec: ExperimentSpec,
    trial: usize,
    solvers: Vec<SolverKind>,
}

fn run_cells(cells: Vec<Cell>) -> Result<Vec<(CellRow, RunOutcome)>, RunError> {
    let per_cell: Vec<Result<Vec<(CellRow, RunOutcome)>, RunError>> = cells
        .into_par_iter()
        .map(|c| {
            let inst = Instance::build(&c.spec, c.trial)?;
            c.solvers
                .iter()
                .map(|&solver| {
                    let spec = ExperimentSpec { solver, ..c.spec.clone() };
                    let out = run_instance(&spec, &inst, c.trial, RunOptions::from_spec(&spec), None)?;
                    Ok((CellRow::from_outcome(&spec, &inst, c.trial, &out), out))
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_cell {
        rows.extend(r?);
    }
    Ok(rows)
}

fn table_header(title: &str, base: &ExperimentSpec, grid: &[String]) -> Vec<String> {
    let mut h = vec![title.to_string()];
    h.extend(base.header_lines());
    h.extend(grid.iter().cloned());
    h
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn list_f64(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

/// Result of a table command.
#[derive(Debug, Clone)]
pub struct TableResult {
    pub header: Vec<String>,
    pub rows: Vec<CellRow>,
    pub outcomes: Vec<RunOutcome>,
}

impl TableResult {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        output::write_csv(path, &self.header, &ROW_COLUMNS, self.rows.iter().map(CellRow::cells))
    }

    /// Rows whose certificate replay failed.
    pub fn certificate_failures(&self) -> Vec<&CellRow> {
        self.rows.iter().filter(|r| r.certificate_ok == Some(false)).collect()
    }

    pub fn any_overflow(&self) -> bool {
        self.outcomes.iter().any(|o| o.overflow)
    }
}

fn resolve_cell(o: &Overrides, f: impl FnOnce(&mut Overrides)) -> Result<ExperimentSpec, RunError> {
    let mut o = o.clone();
    f(&mut o);
    Ok(ExperimentSpec::resolve(&o)?)
}

/// Quadratic sweep over `μ × Δ × trial`. Both solvers run on each instance with the same rule.
pub fn table_quadratic(o: &Overrides) -> Result<TableResult, RunError> {
    let o = o.clone().or(Overrides {
        problem: Some(ProblemKind::Quadratic),
        stop: Some(StopKind::ConstRule),
        trials: Some(QUADRATIC_TRIALS),
        ..Default::default()
    });
    let mus = o.mu_grid.clone().unwrap_or_else(|| QUADRATIC_MU_GRID.to_vec());
    let deltas = o.delta_grid.clone().unwrap_or_else(|| QUADRATIC_DELTA_GRID.to_vec());
    let base = ExperimentSpec::resolve(&o)?;
    if base.problem != ProblemKind::Quadratic {
        return Err(crate::UsageError("table-quadratic only runs the quadratic problem".into()).into());
    }
    check_grid("mu-grid", &mus, |m| m > 0.0 && m <= 1.0, "(0, 1]")?;
    check_grid("delta-grid", &deltas, |d| d > 0.0, "positive")?;
    let solvers = match o.solver {
        Some(s) => vec![s],
        None => vec![SolverKind::Const, SolverKind::Adaptive],
    };
    let mut cells = Vec::new();
    for &mu in &mus {
        for &delta in &deltas {
            for trial in 0..base.trials {
                let spec = resolve_cell(&o, |c| {
                    c.mu = Some(mu);
                    c.delta = Some(delta);
                })?;
                cells.push(Cell { spec, trial, solvers: solvers.clone() });
            }
        }
    }
    let header = table_header(
        "table = quadratic",
        &base,
        &[format!("mu-grid = {}", list_f64(&mus)), format!("delta-grid = {}", list_f64(&deltas))],
    );
    finish(header, run_cells(cells)?)
}

fn finish(header: Vec<String>, rows: Vec<(CellRow, RunOutcome)>) -> Result<TableResult, RunError> {
    let (rows, outcomes) = rows.into_iter().unzip();
    Ok(TableResult { header, rows, outcomes })
}

fn check_grid<T: Copy + std::fmt::Display>(
    name: &str,
    v: &[T],
    ok: impl Fn(T) -> bool,
    what: &str,
) -> Result<(), RunError> {
    if v.is_empty() {
        return Err(crate::UsageError(format!("--{name} is empty")).into());
    }
    match v.iter().find(|&&x| !ok(x)) {
        Some(bad) => Err(crate::UsageError(format!("--{name} entries must be {what}, got {bad}")).into()),
        None => Ok(()),
    }
}

/// Per `(solver, μ, Δ)` means over trials of a quadratic table.
pub fn quadratic_means(rows: &[CellRow]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let cols = vec![
        "solver",
        "mu",
        "delta",
        "trials",
        "mean_N",
        "N_star_const",
        "mean_dist_from_x0",
        "mean_grad_ratio",
        "mean_f_gap",
    ];
    let mut keys: Vec<(SolverKind, u64, u64)> = Vec::new();
    for r in rows {
        let key = (r.solver, r.mu.unwrap_or(0.0).to_bits(), r.delta.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let out = keys
        .into_iter()
        .map(|(solver, mu, delta)| {
            let group: Vec<&CellRow> = rows
                .iter()
                .filter(|r| {
                    r.solver == solver
                        && r.mu.unwrap_or(0.0).to_bits() == mu
                        && r.delta.to_bits() == delta
                })
                .collect();
            let cnt = group.len() as f64;
            let mean = |f: &dyn Fn(&CellRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / cnt;
            vec![
                solver.to_string(),
                num(f64::from_bits(mu)),
                num(f64::from_bits(delta)),
                group.len().to_string(),
                num(mean(&|r| r.iterations as f64)),
                cell(group[0].n_star_const),
                num(mean(&|r| r.dist_from_x0)),
                num(mean(&|r| r.grad_ratio)),
                if group.iter().all(|r| r.f_gap.is_some()) {
                    num(mean(&|r| r.f_gap.unwrap_or(0.0)))
                } else {
                    String::new()
                },
            ]
        })
        .collect();
    (cols, out)
}

/// Rosenbrock sweep over `noise × Δ × trial` with the adaptive method.
pub fn table_rosenbrock(o: &Overrides) -> Result<TableResult, RunError> {
    let o = o.clone().or(Overrides {
        problem: Some(ProblemKind::Rosenbrock),
        solver: Some(SolverKind::Adaptive),
        stop: Some(StopKind::AdaptiveRule),
        ..Default::default()
    });
    let noises = o.noise_list.clone().unwrap_or_else(|| {
        vec![NoiseKind::Random, NoiseKind::Antigradient, NoiseKind::Constant]
    });
    let deltas = o.delta_grid.clone().unwrap_or_else(|| TABLE_DELTA_GRID.to_vec());
    check_grid("delta-grid", &deltas, |d| d > 0.0, "positive")?;
    if noises.is_empty() {
        return Err(crate::UsageError("--noise-list is empty".into()).into());
    }
    let base = ExperimentSpec::resolve(&o)?;
    let mut cells = Vec::new();
    for noise in &noises {
        for &delta in &deltas {
            for trial in 0..base.trials {
                let spec = resolve_cell(&o, |c| {
                    c.noise = Some(noise.clone());
                    c.delta = Some(delta);
                })?;
                cells.push(Cell { spec, trial, solvers: vec![base.solver] });
            }
        }
    }
    let header = table_header(
        "table = rosenbrock",
        &base,
        &[format!("noise-list = {}", list(&noises)), format!("delta-grid = {}", list_f64(&deltas))],
    );
    finish(header, run_cells(cells)?)
}

/// Nesterov–Skokov sweep over `n × Δ × trial` with the adaptive method.
pub fn table_nesterov_skokov(o: &Overrides) -> Result<TableResult, RunError> {
    let o = o.clone().or(Overrides {
        problem: Some(ProblemKind::NesterovSkokov),
        solver: Some(SolverKind::Adaptive),
        stop: Some(StopKind::AdaptiveRule),
        ..Default::default()
    });
    let ns = o.n_grid.clone().unwrap_or_else(|| NS_N_GRID.to_vec());
    let deltas = o.delta_grid.clone().unwrap_or_else(|| TABLE_DELTA_GRID.to_vec());
    check_grid("n-grid", &ns, |n| n >= 2, "at least 2")?;
    check_grid("delta-grid", &deltas, |d| d > 0.0, "positive")?;
    let base = ExperimentSpec::resolve(&o)?;
    let mut cells = Vec::new();
    for &n in &ns {
        for &delta in &deltas {
            for trial in 0..base.trials {
                let spec = resolve_cell(&o, |c| {
                    c.n = Some(n);
                    c.delta = Some(delta);
                })?;
                cells.push(Cell { spec, trial, solvers: vec![base.solver] });
            }
        }
    }
    let header = table_header(
        "table = nesterov-skokov",
        &base,
        &[format!("n-grid = {}", list(&ns)), format!("delta-grid = {}", list_f64(&deltas))],
    );
    finish(header, run_cells(cells)?)
}

/// Output of the logistic-regression experiment.
#[derive(Debug, Clone)]
pub struct LogregResult {
    pub spec: ExperimentSpec,
    pub instance: Instance,
    /// Lowest value seen in the long exact reference run.
    pub f_star_estimate: f64,
    pub ref_iters: usize,
    pub stopped: RunOutcome,
    pub free: RunOutcome,
}

/// Exact gradient descent with step `1/L` for `iters` steps; returns the lowest value seen.
pub fn estimate_f_star(inst: &Instance, iters: usize) -> Result<f64, RunError> {
    let l = inst.step_l.expect("logreg knows its smoothness constant");
    let mut oracle = inexact_gd_core::InexactOracle::exact(inst.problem.clone());
    let cfg = inexact_gd_core::ConstStepConfig::new(l, inst.x0.clone())
        .with_stop(inexact_gd_core::StopRule::none(iters))
        .with_keep_iterates(false);
    let run = inexact_gd_core::run_const_step_gd(&mut oracle, &cfg).map_err(RunError::Solver)?;
    Ok(run.records.iter().map(|r| r.f_gap).fold(f64::INFINITY, f64::min))
}

pub fn logreg(o: &Overrides) -> Result<LogregResult, RunError> {
    let o = o.clone().or(Overrides {
        problem: Some(ProblemKind::Logreg),
        max_iters: Some(LOGREG_MAX_ITERS),
        ..Default::default()
    });
    let spec = ExperimentSpec::resolve(&o)?;
    if spec.problem != ProblemKind::Logreg {
        return Err(crate::UsageError("the logreg command only runs the logreg problem".into()).into());
    }
    let ref_iters = o.ref_iters.unwrap_or(LOGREG_REF_ITERS);
    if ref_iters == 0 {
        return Err(crate::UsageError("--ref-iters must be positive".into()).into());
    }
    let instance = Instance::build(&spec, 0)?;
    let f_star_estimate = estimate_f_star(&instance, ref_iters)?;
    let stop = match spec.stop {
        StopKind::None => match spec.solver {
            SolverKind::Const => StopKind::ConstRule,
            SolverKind::Adaptive => StopKind::AdaptiveRule,
        },
        s => s,
    };
    let with_rule = RunOptions { stop, ..RunOptions::from_spec(&spec) };
    let without = RunOptions { stop: StopKind::None, certify: false, ..RunOptions::from_spec(&spec) };
    let fs = Some(f_star_estimate);
    let (stopped, free) = rayon::join(
        || run_instance(&spec, &instance, 0, with_rule, fs),
        || run_instance(&spec, &instance, 0, without, fs),
    );
    Ok(LogregResult {
        spec,
        instance,
        f_star_estimate,
        ref_iters,
        stopped: stopped?,
        free: free?,
    })
}

impl LogregResult {
    pub fn header(&self) -> Vec<String> {
        let mut h = self.spec.header_lines();
        h.push(format!("estimated f* = {}", num(self.f_star_estimate)));
        h.push(format!("reference iterations = {}", self.ref_iters));
        if let Some(l) = self.instance.step_l {
            h.push(format!("L (largest Gram eigenvalue / 4m) = {}", num(l)));
        }
        h
    }

    /// Writes data, per-iteration files and plot curves into `dir`; returns the paths written.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let header = self.header();
        if let crate::problem::Problem::Logreg(lr) = &self.instance.problem {
            let data = lr.data();
            let mut cols: Vec<String> = (0..data.n()).map(|j| format!("a{j}")).collect();
            cols.push("label".into());
            let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            let rows = data.rows().zip(data.labels()).map(|(row, &b)| {
                let mut cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
                cells.push(num(b));
                cells
            });
            let p = dir.join("logreg_data.csv");
            output::write_csv(&p, &self.spec.header_lines(), &col_refs, rows)?;
            written.push(p);
        }
        for (tag, out) in [("stop", &self.stopped), ("free", &self.free)] {
            let mut h = header.clone();
            h.push(format!("run = {tag} ({})", stop_reason_name(out.run.stop_reason)));
            let p = dir.join(format!("logreg_{tag}.csv"));
            output::write_iterations_csv(&p, &h, &out.run.records, self.f_star_estimate)?;
            written.push(p);
            let base = out.run.f_star.unwrap_or(0.0);
            let curves: [(&str, Box<dyn Fn(&inexact_gd_core::IterationRecord) -> f64>); 4] = [
                ("grad_exact", Box::new(|r| r.exact_grad_norm)),
                ("grad_tilde", Box::new(|r| r.tilde_grad_norm)),
                ("dist", Box::new(|r| r.dist_from_x0)),
                ("f_gap", Box::new(move |r| r.f_gap + base - self.f_star_estimate)),
            ];
            for (name, f) in curves.iter() {
                let mut h = h.clone();
                h.push(format!("columns = k {name}"));
                let p = dir.join(format!("logreg_{tag}_{name}.dat"));
                output::write_dat(&p, &h, out.run.records.iter().map(|r| (r.k as f64, f(r))))?;
                written.push(p);
            }
        }
        let p = dir.join("logreg_report.json");
        output::write_json(&p, &self.report())?;
        written.push(p);
        Ok(written)
    }

    pub fn report(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "estimated_f_star": self.f_star_estimate,
            "reference_iterations": self.ref_iters,
            "with_rule": {
                "summary": self.stopped.summary(self.spec.delta),
                "bounds": self.stopped.bounds,
                "certificate": self.stopped.certificate,
            },
            "without_rule": {
                "summary": self.free.summary(self.spec.delta),
            },
        })
    }
}
