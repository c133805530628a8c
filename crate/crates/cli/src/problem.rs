//! Builds problem instances, start points and noise models from a resolved `ExperimentSpec`.

use inexact_gd_core::problems::{
    LogRegData, LogisticRegression, NesterovSkokov, QuadraticDiag, Rosenbrock, Simple3D,
};
use inexact_gd_core::{ConfigError, NoiseModel, Objective, RngStream};

use crate::spec::{ExperimentSpec, NoiseKind, ProblemKind};

/// Distance from the quadratic start point to the nearest minimizer.
pub const QUADRATIC_X0_DIST: f64 = 948.7;

/// Random stream that generates the problem data of a trial.
pub fn problem_stream(seed: u64, trial: usize) -> RngStream {
    RngStream::new(seed, 2 * trial as u64)
}

/// Random stream that drives the oracle noise of a trial.
pub fn oracle_stream(seed: u64, trial: usize) -> RngStream {
    RngStream::new(seed, 2 * trial as u64 + 1)
}

/// Any of the benchmark objectives, so one solver instantiation serves them all.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(QuadraticDiag),
    Simple3d(Simple3D),
    Logreg(LogisticRegression),
    Rosenbrock(Rosenbrock),
    NesterovSkokov(NesterovSkokov),
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Problem::Quadratic($p) => $e,
            Problem::Simple3d($p) => $e,
            Problem::Logreg($p) => $e,
            Problem::Rosenbrock($p) => $e,
            Problem::NesterovSkokov($p) => $e,
        }
    };
}

impl Objective for Problem {
    fn dim(&self) -> usize {
        dispatch!(self, p => p.dim())
    }
    fn value(&self, x: &[f64]) -> f64 {
        dispatch!(self, p => p.value(x))
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        dispatch!(self, p => p.gradient(x))
    }
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        dispatch!(self, p => p.value_and_gradient(x))
    }
    fn f_star(&self) -> Option<f64> {
        dispatch!(self, p => p.f_star())
    }
    fn lipschitz(&self) -> Option<f64> {
        dispatch!(self, p => p.lipschitz())
    }
    fn pl_mu(&self) -> Option<f64> {
        dispatch!(self, p => p.pl_mu())
    }
}

/// A problem together with everything a run needs besides the solver settings.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: Problem,
    pub x0: Vec<f64>,
    /// Step constant of the constant-step method and `L` of the bounds.
    pub step_l: Option<f64>,
    /// PL modulus used by the bounds and certificates.
    pub mu: Option<f64>,
}

impl Instance {
    pub fn build(spec: &ExperimentSpec, trial: usize) -> Result<Instance, ConfigError> {
        let mut rng = problem_stream(spec.seed, trial);
        let (problem, x0) = match spec.problem {
            ProblemKind::Quadratic => {
                let q = QuadraticDiag::random(
                    spec.n,
                    spec.k,
                    spec.mu.expect("resolved"),
                    spec.l.expect("resolved"),
                    &mut rng,
                )?;
                let c = QUADRATIC_X0_DIST / ((spec.n - spec.k) as f64).sqrt();
                (Problem::Quadratic(q), vec![c; spec.n])
            }
            ProblemKind::Simple3d => {
                let s = Simple3D::new(spec.l.expect("resolved"), spec.mu.expect("resolved"))?;
                (Problem::Simple3d(s), vec![0.0; 3])
            }
            ProblemKind::Logreg => {
                let data = LogRegData::generate(spec.n, spec.m, spec.k, &mut rng)?;
                (Problem::Logreg(LogisticRegression::new(data)), vec![0.0; spec.n])
            }
            ProblemKind::Rosenbrock => (Problem::Rosenbrock(Rosenbrock), Rosenbrock::START.to_vec()),
            ProblemKind::NesterovSkokov => {
                let ns = NesterovSkokov::new(spec.n)?;
                let x0 = ns.start_point();
                (Problem::NesterovSkokov(ns), x0)
            }
        };
        let step_l = match spec.problem {
            ProblemKind::Quadratic | ProblemKind::Simple3d => problem.lipschitz(),
            _ => spec.l.or_else(|| problem.lipschitz()),
        };
        let mu = match spec.problem {
            ProblemKind::Quadratic | ProblemKind::Simple3d => problem.pl_mu(),
            _ => spec.mu,
        };
        Ok(Instance {
            problem,
            x0,
            step_l,
            mu,
        })
    }

    /// Resolves a noise selector against this problem's default constant direction.
    pub fn noise_model(&self, kind: &NoiseKind) -> Result<NoiseModel, ConfigError> {
        let dim = self.problem.dim();
        Ok(match kind {
            NoiseKind::None => NoiseModel::None,
            NoiseKind::Random => NoiseModel::RandomSphere,
            NoiseKind::Antigradient => NoiseModel::Antigradient,
            NoiseKind::FirstComponent => NoiseModel::FirstComponentBias,
            NoiseKind::ConstantVec(v) => NoiseModel::constant(v)?,
            NoiseKind::Constant => match self.problem {
                // Along the coordinate the objective ignores.
                Problem::Simple3d(_) => NoiseModel::constant_last_axis(dim)?,
                Problem::Rosenbrock(_) => NoiseModel::constant(&[1.0, 0.0])?,
                _ => NoiseModel::constant(&vec![1.0; dim])?,
            },
        })
    }

    /// Initial gap `f(x₀) − f*` when `f*` is known.
    pub fn gap0(&self) -> Option<f64> {
        self.problem.f_star().map(|fs| self.problem.value(&self.x0) - fs)
    }

    /// `‖x₀ − x*‖` to the nearest minimizer, when known in closed form.
    pub fn dist_to_solution(&self) -> Option<f64> {
        match &self.problem {
            Problem::Quadratic(q) => Some(q.dist_to_solutions(&self.x0)),
            Problem::Rosenbrock(_) => Some(inexact_gd_core::vector::dist(
                &self.x0,
                &Rosenbrock::MINIMIZER,
            )),
            Problem::NesterovSkokov(ns) => {
                Some(inexact_gd_core::vector::dist(&self.x0, &ns.minimizer()))
            }
            _ => None,
        }
    }
}
