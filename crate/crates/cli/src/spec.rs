//! Experiment specifications: flags, config files and default resolution.
//!
//! Precedence is command-line flag, then config-file key, then the built-in default for the
//! chosen problem.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use crate::output::num;
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Quadratic,
    Simple3d,
    Logreg,
    Rosenbrock,
    NesterovSkokov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Const,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopKind {
    ConstRule,
    AdaptiveRule,
    None,
}

/// Noise selector. `constant` uses the problem's default direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    Random,
    Antigradient,
    Constant,
    /// An explicit direction, normalized before use.
    ConstantVec(Vec<f64>),
    FirstComponent,
}

macro_rules! display_via_value_enum {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
            }
        }
        impl FromStr for $t {
            type Err = UsageError;
            fn from_str(s: &str) -> Result<Self, UsageError> {
                <$t as ValueEnum>::from_str(s, true).map_err(UsageError)
            }
        }
    )*};
}

display_via_value_enum!(ProblemKind, SolverKind, StopKind);

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::None => f.write_str("none"),
            NoiseKind::Random => f.write_str("random"),
            NoiseKind::Antigradient => f.write_str("antigradient"),
            NoiseKind::Constant => f.write_str("constant"),
            NoiseKind::ConstantVec(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "constant:{}", parts.join(","))
            }
            NoiseKind::FirstComponent => f.write_str("first-component"),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("constant:") {
            return Ok(NoiseKind::ConstantVec(parse_list(rest)?));
        }
        match s.to_ascii_lowercase().as_str() {
            "none" | "exact" => Ok(NoiseKind::None),
            "random" | "sphere" => Ok(NoiseKind::Random),
            "antigradient" => Ok(NoiseKind::Antigradient),
            "constant" => Ok(NoiseKind::Constant),
            "first-component" => Ok(NoiseKind::FirstComponent),
            other => Err(UsageError(format!(
                "unknown noise '{other}' (none, random, antigradient, constant, constant:v1,v2,…, first-component)"
            ))),
        }
    }
}

/// Parses a comma-separated list such as `1e-4,1e-3`.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, UsageError>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| UsageError(format!("bad list item '{p}': {e}"))))
        .collect()
}

/// Parses noise selectors separated by `,`, or by `;` when explicit `constant:` vectors are
/// present.
pub fn parse_noise_list(s: &str) -> Result<Vec<NoiseKind>, UsageError> {
    let sep = if s.contains(':') { ';' } else { ',' };
    s.split(sep)
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect()
}

/// Partially specified experiment, from flags or a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<ProblemKind>,
    pub solver: Option<SolverKind>,
    pub noise: Option<NoiseKind>,
    pub delta: Option<f64>,
    pub small_delta: Option<f64>,
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub stop: Option<StopKind>,
    pub max_iters: Option<usize>,
    pub out: Option<PathBuf>,
    pub l0: Option<f64>,
    pub l_min: Option<f64>,
    pub mu_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub noise_list: Option<Vec<NoiseKind>>,
    pub ref_iters: Option<usize>,
}

macro_rules! merge_fields {
    ($self:ident, $other:ident; $($f:ident),*) => {
        Overrides { $($f: $self.$f.or($other.$f)),* }
    };
}

impl Overrides {
    /// Fields of `self` win; gaps are filled from `fallback`.
    pub fn or(self, fallback: Overrides) -> Overrides {
        merge_fields!(self, fallback; problem, solver, noise, delta, small_delta, mu, l, n, k, m,
            seed, trials, stop, max_iters, out, l0, l_min, mu_grid, delta_grid, n_grid,
            noise_list, ref_iters)
    }

    /// Reads a flat `key = value` file. Blank lines and lines starting with `#` are skipped;
    /// keys match the long flag names (`small-delta` and `small_delta` are both accepted).
    pub fn from_config_str(text: &str) -> Result<Overrides, UsageError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                UsageError(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            let at = |e: UsageError| UsageError(format!("config line {}: {}", lineno + 1, e.0));
            o.set(&key, value).map_err(at)?;
        }
        Ok(o)
    }

    pub fn from_config_file(path: &Path) -> Result<Overrides, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, UsageError>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| UsageError(format!("{key}: {e}")))
        }
        match key {
            "problem" => self.problem = Some(value.parse()?),
            "solver" => self.solver = Some(value.parse()?),
            "noise" => self.noise = Some(value.parse()?),
            "delta" => self.delta = Some(num(key, value)?),
            "small-delta" => self.small_delta = Some(num(key, value)?),
            "mu" => self.mu = Some(num(key, value)?),
            "L" | "l" => self.l = Some(num(key, value)?),
            "n" => self.n = Some(num(key, value)?),
            "k" => self.k = Some(num(key, value)?),
            "m" => self.m = Some(num(key, value)?),
            "seed" => self.seed = Some(num(key, value)?),
            "trials" => self.trials = Some(num(key, value)?),
            "stop" => self.stop = Some(value.parse()?),
            "max-iters" => self.max_iters = Some(num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "l0" | "L0" => self.l0 = Some(num(key, value)?),
            "l-min" | "L-min" => self.l_min = Some(num(key, value)?),
            "mu-grid" => self.mu_grid = Some(parse_list(value)?),
            "delta-grid" => self.delta_grid = Some(parse_list(value)?),
            "n-grid" => self.n_grid = Some(parse_list(value)?),
            "noise-list" => self.noise_list = Some(parse_noise_list(value)?),
            "ref-iters" => self.ref_iters = Some(num(key, value)?),
            other => return Err(UsageError(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }
}

/// A fully resolved single-run experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub solver: SolverKind,
    pub noise: NoiseKind,
    pub delta: f64,
    pub small_delta: f64,
    /// PL modulus: a problem parameter for quadratic and simple3d, otherwise only a theory input.
    pub mu: Option<f64>,
    /// Smoothness parameter: a problem parameter for quadratic and simple3d, the step constant
    /// override for the others.
    pub l: Option<f64>,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
    pub trials: usize,
    pub stop: StopKind,
    pub max_iters: usize,
    pub l0: f64,
    pub l_min: f64,
    /// Where files go; not part of the experiment, so reports omit it.
    #[serde(skip)]
    pub out: PathBuf,
}

pub const DEFAULT_OUT: &str = "out";

/// Floor for the adaptive estimate when `μ` is unknown.
pub const DEFAULT_L_MIN_NO_MU: f64 = 1e-6;

impl ExperimentSpec {
    /// Fills every unset field with the defaults of the chosen problem and validates the result.
    pub fn resolve(o: &Overrides) -> Result<ExperimentSpec, UsageError> {
        let problem = o.problem.unwrap_or(ProblemKind::Quadratic);
        let (solver_d, noise_d, delta_d, n_d, k_d, m_d) = match problem {
            ProblemKind::Quadratic => (SolverKind::Const, NoiseKind::Random, 1e-4, 100, 10, 0),
            ProblemKind::Simple3d => (SolverKind::Const, NoiseKind::Constant, 0.01, 3, 0, 0),
            ProblemKind::Logreg => (SolverKind::Const, NoiseKind::Random, 0.1, 200, 10, 700),
            ProblemKind::Rosenbrock => (SolverKind::Adaptive, NoiseKind::Random, 1e-3, 2, 0, 0),
            ProblemKind::NesterovSkokov => {
                (SolverKind::Adaptive, NoiseKind::Random, 1e-4, 7, 0, 0)
            }
        };
        let solver = o.solver.unwrap_or(solver_d);
        let (mu, l) = match problem {
            ProblemKind::Quadratic | ProblemKind::Simple3d => {
                (Some(o.mu.unwrap_or(0.1)), Some(o.l.unwrap_or(1.0)))
            }
            _ => (o.mu, o.l),
        };
        let n = match problem {
            ProblemKind::Simple3d => 3,
            ProblemKind::Rosenbrock => 2,
            _ => o.n.unwrap_or(n_d),
        };
        let delta = o.delta.unwrap_or(delta_d);
        // L is known up front for the parametric problems; logreg computes it later and
        // takes this default only with an explicit --L.
        let l_known = match problem {
            ProblemKind::Quadratic => l,
            ProblemKind::Simple3d => l.map(|l| 2.0 * l),
            ProblemKind::Logreg => l,
            _ => None,
        };
        let small_delta = match (o.small_delta, problem) {
            (Some(d), _) => d,
            (None, ProblemKind::Rosenbrock | ProblemKind::NesterovSkokov) => delta * delta,
            (None, _) => match l_known {
                Some(l) => delta * delta / (16.0 * l),
                None => delta * delta,
            },
        };
        let stop_d = match solver {
            SolverKind::Const => StopKind::ConstRule,
            SolverKind::Adaptive => StopKind::AdaptiveRule,
        };
        let pl_mu = match problem {
            ProblemKind::Simple3d => mu.map(|m| 2.0 * m),
            _ => mu,
        };
        let l0 = o.l0.unwrap_or(1.0);
        let spec = ExperimentSpec {
            problem,
            solver,
            noise: o.noise.clone().unwrap_or(noise_d),
            delta,
            small_delta,
            mu,
            l,
            n,
            k: o.k.unwrap_or(k_d),
            m: o.m.unwrap_or(m_d),
            seed: o.seed.unwrap_or(0),
            trials: o.trials.unwrap_or(1),
            stop: o.stop.unwrap_or(stop_d),
            max_iters: o.max_iters.unwrap_or(inexact_gd_core::solvers::DEFAULT_MAX_ITERS),
            l0,
            l_min: o
                .l_min
                .unwrap_or_else(|| pl_mu.map_or(DEFAULT_L_MIN_NO_MU, |m| (m / 4.0).min(l0))),
            out: o.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let err = |m: String| Err(UsageError(m));
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return err(format!("--delta must be ≥ 0, got {}", num(self.delta)));
        }
        if !(self.small_delta.is_finite() && self.small_delta >= 0.0) {
            return err(format!("--small-delta must be ≥ 0, got {}", num(self.small_delta)));
        }
        if let Some(mu) = self.mu {
            if !pos(mu) {
                return err(format!("--mu must be > 0, got {}", num(mu)));
            }
        }
        if let Some(l) = self.l {
            if !pos(l) {
                return err(format!("--L must be > 0, got {}", num(l)));
            }
        }
        if !pos(self.l0) {
            return err(format!("--l0 must be > 0, got {}", num(self.l0)));
        }
        if !(self.l_min.is_finite() && self.l_min >= 0.0 && self.l_min <= self.l0) {
            return err(format!("--l-min must lie in [0, L0], got {}", num(self.l_min)));
        }
        if self.max_iters == 0 {
            return err("--max-iters must be positive".into());
        }
        if self.trials == 0 {
            return err("--trials must be positive".into());
        }
        match self.problem {
            ProblemKind::Quadratic => {
                let (mu, l) = (self.mu.unwrap(), self.l.unwrap());
                if mu > l {
                    return err(format!("quadratic needs μ ≤ L, got μ = {}, L = {}", num(mu), num(l)));
                }
                if self.k >= self.n {
                    return err(format!("quadratic needs k < n, got n = {}, k = {}", self.n, self.k));
                }
                if self.n - self.k == 1 && mu < l {
                    return err("quadratic with one nonzero coefficient needs μ = L".into());
                }
            }
            ProblemKind::Simple3d => {
                let (mu, l) = (self.mu.unwrap(), self.l.unwrap());
                if mu >= l {
                    return err(format!("simple3d needs L > μ, got μ = {}, L = {}", num(mu), num(l)));
                }
            }
            ProblemKind::Logreg => {
                if self.n == 0 || self.k == 0 || self.k > self.n || 2 * self.k > self.m {
                    return err(format!(
                        "logreg needs 1 ≤ k ≤ min(n, m/2), got n = {}, m = {}, k = {}",
                        self.n, self.m, self.k
                    ));
                }
            }
            ProblemKind::Rosenbrock => {}
            ProblemKind::NesterovSkokov => {
                if self.n < 2 {
                    return err(format!("nesterov-skokov needs n ≥ 2, got {}", self.n));
                }
            }
        }
        if self.solver == SolverKind::Const
            && matches!(self.problem, ProblemKind::Rosenbrock | ProblemKind::NesterovSkokov)
            && self.l.is_none()
        {
            return err(format!(
                "{} has no global smoothness constant; pass --L for the constant-step solver",
                self.problem
            ));
        }
        if let NoiseKind::ConstantVec(v) = &self.noise {
            if v.len() != self.n {
                return err(format!(
                    "constant noise vector has {} entries, problem dimension is {}",
                    v.len(),
                    self.n
                ));
            }
        }
        Ok(())
    }

    /// `key = value` lines describing every resolved field, for file headers.
    pub fn header_lines(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "unset".to_string(), num);
        vec![
            format!("problem = {}", self.problem),
            format!("solver = {}", self.solver),
            format!("noise = {}", self.noise),
            format!("delta = {}", num(self.delta)),
            format!("small-delta = {}", num(self.small_delta)),
            format!("mu = {}", opt(self.mu)),
            format!("L = {}", opt(self.l)),
            format!("n = {}", self.n),
            format!("k = {}", self.k),
            format!("m = {}", self.m),
            format!("seed = {}", self.seed),
            format!("trials = {}", self.trials),
            format!("stop = {}", self.stop),
            format!("max-iters = {}", self.max_iters),
            format!("l0 = {}", num(self.l0)),
            format!("l-min = {}", num(self.l_min)),
        ]
    }
}
