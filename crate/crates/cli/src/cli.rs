//! Command-line front end. [`main_with_args`] is the whole program minus `process::exit`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::experiments::{self, TableResult};
use crate::output::{self, num};
use crate::runner::{self, RunError};
use crate::spec::{
    parse_list, parse_noise_list, ExperimentSpec, NoiseKind, Overrides, ProblemKind, SolverKind,
    StopKind,
};
use crate::validate::{run_validation, NamedObjective};
use crate::{exit, UsageError};

#[derive(Debug, Parser)]
#[command(name = "inexact-gd", version, about = "Gradient descent with inexact oracles: runs, tables and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One solver run; writes run.csv and run_report.json.
    Run(CommonArgs),
    /// Quadratic sweep over μ × Δ × trials with both solvers.
    TableQuadratic(CommonArgs),
    /// Logistic regression with and without the stopping rule, plus convergence curves.
    Logreg(CommonArgs),
    /// Rosenbrock sweep over noise × Δ with the adaptive method.
    Rosenbrock(CommonArgs),
    /// Nesterov–Skokov sweep over n × Δ with the adaptive method.
    NesterovSkokov(CommonArgs),
    /// Invariant suite: gradients, oracle bounds, certificates, minors.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub problem: Option<ProblemKind>,
    #[arg(long)]
    pub solver: Option<SolverKind>,
    /// none, random, antigradient, constant, constant:v1,v2,… or first-component.
    #[arg(long)]
    pub noise: Option<NoiseKind>,
    /// Gradient inexactness Δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Value inexactness δ.
    #[arg(long)]
    pub small_delta: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub stop: Option<StopKind>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key = value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial estimate of the adaptive method.
    #[arg(long)]
    pub l0: Option<f64>,
    /// Floor of the adaptive estimate.
    #[arg(long)]
    pub l_min: Option<f64>,
    /// Comma-separated list.
    #[arg(long)]
    pub mu_grid: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    pub delta_grid: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Semicolon-separated when an entry carries a vector, otherwise comma-separated.
    #[arg(long)]
    pub noise_list: Option<String>,
    /// Exact iterations used to estimate f* for logreg.
    #[arg(long)]
    pub ref_iters: Option<usize>,
}

impl CommonArgs {
    /// Flags over config file; built-in defaults are applied later by resolution.
    pub fn overrides(&self) -> Result<Overrides, UsageError> {
        let flags = Overrides {
            problem: self.problem,
            solver: self.solver,
            noise: self.noise.clone(),
            delta: self.delta,
            small_delta: self.small_delta,
            mu: self.mu,
            l: self.l,
            n: self.n,
            k: self.k,
            m: self.m,
            seed: self.seed,
            trials: self.trials,
            stop: self.stop,
            max_iters: self.max_iters,
            out: self.out.clone(),
            l0: self.l0,
            l_min: self.l_min,
            mu_grid: self.mu_grid.as_deref().map(parse_list).transpose()?,
            delta_grid: self.delta_grid.as_deref().map(parse_list).transpose()?,
            n_grid: self.n_grid.as_deref().map(parse_list).transpose()?,
            noise_list: self.noise_list.as_deref().map(parse_noise_list).transpose()?,
            ref_iters: self.ref_iters,
        };
        Ok(match &self.config {
            Some(path) => flags.or(Overrides::from_config_file(path)?),
            None => flags,
        })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output sinks, so tests can capture what the binary would print.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(io.err, "{text}");
            } else {
                let _ = write!(io.out, "{text}");
            }
            return code;
        }
    };
    run_command(cli.command, Vec::new(), io)
}

/// Runs a parsed command. `extra` objectives join the validation suite.
pub fn run_command(command: Command, extra: Vec<NamedObjective>, io: &mut Io<'_>) -> i32 {
    let result = match command {
        Command::Run(a) => a.overrides().map_err(Failure::from).and_then(|o| cmd_run(&o, io)),
        Command::TableQuadratic(a) => table(a, "table_quadratic", experiments::table_quadratic, io),
        Command::Rosenbrock(a) => table(a, "table_rosenbrock", experiments::table_rosenbrock, io),
        Command::NesterovSkokov(a) => {
            table(a, "table_nesterov_skokov", experiments::table_nesterov_skokov, io)
        }
        Command::Logreg(a) => a.overrides().map_err(Failure::from).and_then(|o| cmd_logreg(&o, io)),
        Command::Validate(a) => cmd_validate(&a, extra, io),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure { code: exit::USAGE, message: e.0 }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Usage(u) => u.into(),
            RunError::Solver(s) => Failure { code: exit::OVERFLOW, message: s.to_string() },
        }
    }
}

fn io_failure(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure {
        code: exit::USAGE,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn out_dir(o: &Overrides) -> PathBuf {
    o.out.clone().unwrap_or_else(|| PathBuf::from(crate::spec::DEFAULT_OUT))
}

fn cmd_run(o: &Overrides, io: &mut Io<'_>) -> Result<i32, Failure> {
    let spec = ExperimentSpec::resolve(o)?;
    let (inst, outcome) = runner::execute(&spec, 0)?;
    for w in &outcome.warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    let dir = spec.out.clone();
    let csv = dir.join("run.csv");
    let mut header = spec.header_lines();
    if let Some(fs) = outcome.f_star {
        header.push(format!("f* = {}", num(fs)));
    }
    output::write_iterations_csv(&csv, &header, &outcome.run.records, 0.0).map_err(io_failure(&csv))?;
    let summary = outcome.summary(spec.delta);
    let report = serde_json::json!({
        "spec": spec,
        "summary": summary,
        "x_hat": outcome.run.x_hat,
        "bounds": outcome.bounds,
        "certificate": outcome.certificate,
        "warnings": outcome.warnings,
    });
    let json = dir.join("run_report.json");
    output::write_json(&json, &report).map_err(io_failure(&json))?;

    let _ = writeln!(io.out, "{summary}");
    if let Some(b) = &outcome.bounds {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |x| format!("{x:.6e}"));
        let _ = writeln!(
            io.out,
            "bounds: N*={} gap<={} dist<={} | adaptive N*={} gap<={} dist<={}",
            b.n_star_const.map_or_else(|| "n/a".into(), |n| n.to_string()),
            opt(b.gap_guarantee_const),
            opt(b.dist_bound_const),
            b.n_star_adaptive.map_or_else(|| "n/a".into(), |n| n.to_string()),
            opt(b.gap_guarantee_adaptive),
            opt(b.dist_bound_adaptive),
        );
    }
    if let Some(d) = inst.dist_to_solution() {
        let _ = writeln!(io.out, "|x0-x*| = {d:.6e}");
    }
    if let Some(c) = &outcome.certificate {
        let _ = writeln!(
            io.out,
            "certificates: {} (worst violation {:.3e})",
            if c.verdict { "pass" } else { "FAIL" },
            c.worst_violation
        );
    }
    let _ = writeln!(io.out, "time: {:.3} ms", outcome.elapsed.as_secs_f64() * 1e3);
    let _ = writeln!(io.out, "wrote {} and {}", csv.display(), json.display());
    if outcome.overflow {
        let _ = writeln!(io.err, "last finite iterate: {:?}", outcome.run.x_hat);
        return Ok(exit::OVERFLOW);
    }
    Ok(exit::SUCCESS)
}

fn table(
    a: CommonArgs,
    stem: &str,
    f: fn(&Overrides) -> Result<TableResult, RunError>,
    io: &mut Io<'_>,
) -> Result<i32, Failure> {
    let o = a.overrides()?;
    let start = Instant::now();
    let t = f(&o)?;
    let dir = out_dir(&o);
    let path = dir.join(format!("{stem}.csv"));
    t.write(&path).map_err(io_failure(&path))?;
    for r in &t.rows {
        let _ = writeln!(io.out, "{}", r.display_line());
    }
    if stem == "table_quadratic" {
        let (cols, rows) = experiments::quadratic_means(&t.rows);
        let mean = dir.join(format!("{stem}_mean.csv"));
        output::write_csv(&mean, &t.header, &cols, rows).map_err(io_failure(&mean))?;
        let _ = writeln!(io.out, "wrote {}", mean.display());
    }
    for r in t.certificate_failures() {
        let _ = writeln!(
            io.err,
            "warning: certificate replay failed for {} μ={:?} Δ={} trial {}",
            r.solver, r.mu, r.delta, r.trial
        );
    }
    let _ = writeln!(io.out, "wrote {} ({} rows) in {:.3} s", path.display(), t.rows.len(), start.elapsed().as_secs_f64());
    Ok(if t.any_overflow() { exit::OVERFLOW } else { exit::SUCCESS })
}

fn cmd_logreg(o: &Overrides, io: &mut Io<'_>) -> Result<i32, Failure> {
    let start = Instant::now();
    let r = experiments::logreg(o)?;
    let dir = r.spec.out.clone();
    let written = r.write(&dir).map_err(io_failure(&dir))?;
    let _ = writeln!(io.out, "estimated f* = {:.12e} ({} exact iterations)", r.f_star_estimate, r.ref_iters);
    let _ = writeln!(io.out, "with rule:    {}", r.stopped.summary(r.spec.delta));
    let _ = writeln!(io.out, "without rule: {}", r.free.summary(r.spec.delta));
    let _ = writeln!(io.out, "wrote {} files to {} in {:.3} s", written.len(), dir.display(), start.elapsed().as_secs_f64());
    Ok(if r.stopped.overflow || r.free.overflow { exit::OVERFLOW } else { exit::SUCCESS })
}

fn cmd_validate(a: &ValidateArgs, extra: Vec<NamedObjective>, io: &mut Io<'_>) -> Result<i32, Failure> {
    let start = Instant::now();
    let report = run_validation(a.seed, extra);
    let _ = write!(io.out, "{}", report.table());
    let dir = a.out.clone().unwrap_or_else(|| PathBuf::from(crate::spec::DEFAULT_OUT));
    let path = dir.join("validate.csv");
    report
        .write_csv(&path, &[format!("seed = {}", a.seed)])
        .map_err(io_failure(&path))?;
    let _ = writeln!(io.out, "time: {:.3} s", start.elapsed().as_secs_f64());
    if report.all_passed() {
        let _ = writeln!(io.out, "all {} checks passed", report.results.len());
        Ok(exit::SUCCESS)
    } else {
        for f in report.failures() {
            let _ = writeln!(io.err, "FAILED: {} on {}", f.check, f.subject);
        }
        Ok(exit::VALIDATION_FAILURE)
    }
}
