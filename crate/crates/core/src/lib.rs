//! Gradient descent under additively inexact gradients.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is pure computation:
//!
//! * [`oracle`] and [`noise`]: inexact first-order oracles `∇̃f = ∇f + Δ·u` with `‖u‖ ≤ 1`,
//!   plus value oracles `f̃ = f + δ·η` with `|η| ≤ 1`.
//! * [`problems`]: benchmark objectives with their known constants (diagonal quadratics, a
//!   3-D degenerate quadratic, synthetic logistic regression, Rosenbrock, Nesterov–Skokov).
//! * [`solvers`]: constant-step gradient descent and the adaptive doubling/halving variant,
//!   both with gradient-norm early stopping and full trajectory recording.
//! * [`theory`]: closed-form iteration budgets and distance bounds, and post-hoc certificate
//!   checks that replay a recorded trajectory against the descent inequalities.
//!
//! File formats, the command line and the experiment harness live in the `inexact-gd` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod noise;
pub mod objective;
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod solvers;
pub mod theory;
pub mod vector;

pub use error::{ConfigError, OracleError, SolverError, TheoryError};
pub use noise::{noise_direction, sample_unit_sphere, NoiseModel};
pub use objective::{finite_diff_gradient, gradient_check, GradientCheck, Objective};
pub use oracle::{GradientSample, InexactOracle};
pub use rng::RngStream;
pub use solvers::{
    run_adaptive_gd, run_const_step_gd, AdaptiveConfig, ConstStepConfig, IterationRecord,
    RunResult, StopReason, StopRule,
};
pub use theory::{BoundsReport, CertificateReport, TheoryInputs};
