//! Inexact first-order oracle.

use alloc::format;

use crate::error::{ConfigError, OracleError};
use crate::noise::{noise_direction, NoiseModel};
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::vector::{self, Vector};

/// Exact and perturbed gradient at the same query point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub exact: Vector,
    pub inexact: Vector,
}

/// Wraps an objective and answers with `∇̃f(x) = ∇f(x) + Δ·u(x)` and `f̃(x) = f(x) + δ·η`,
/// where `u` comes from the noise model (`‖u‖ ≤ 1`) and `η` is uniform on `[−1, 1]`.
///
/// Hence `‖∇f − ∇̃f‖ ≤ Δ` and `|f − f̃| ≤ δ` at every query. All randomness is drawn from the
/// oracle's own [`RngStream`] in query order, so replaying the same queries replays the answers.
#[derive(Debug, Clone)]
pub struct InexactOracle<O> {
    objective: O,
    delta: f64,
    small_delta: f64,
    noise: NoiseModel,
    rng: RngStream,
    grad_queries: usize,
    value_queries: usize,
}

impl<O: Objective> InexactOracle<O> {
    pub fn new(
        objective: O,
        delta: f64,
        small_delta: f64,
        noise: NoiseModel,
        rng: RngStream,
    ) -> Result<Self, ConfigError> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(ConfigError::Invalid(format!("Δ must be finite and ≥ 0, got {delta}")));
        }
        if !(small_delta.is_finite() && small_delta >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "δ must be finite and ≥ 0, got {small_delta}"
            )));
        }
        if let NoiseModel::Constant(v) = &noise {
            if v.len() != objective.dim() {
                return Err(ConfigError::Invalid(format!(
                    "constant noise has dimension {}, objective has {}",
                    v.len(),
                    objective.dim()
                )));
            }
        }
        Ok(Self {
            objective,
            delta,
            small_delta,
            noise,
            rng,
            grad_queries: 0,
            value_queries: 0,
        })
    }

    /// An oracle that returns exact values and gradients.
    pub fn exact(objective: O) -> Self {
        Self::new(objective, 0.0, 0.0, NoiseModel::None, RngStream::new(0, 0))
            .expect("zero noise is always valid")
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn small_delta(&self) -> f64 {
        self.small_delta
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn grad_queries(&self) -> usize {
        self.grad_queries
    }

    pub fn value_queries(&self) -> usize {
        self.value_queries
    }

    pub fn query_gradient(&mut self, x: &[f64]) -> Result<GradientSample, OracleError> {
        let dim = self.objective.dim();
        if x.len() != dim {
            return Err(OracleError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        self.grad_queries += 1;
        let exact = self.objective.gradient(x);
        if !vector::is_finite(&exact) {
            return Err(OracleError::NonFiniteGradient { point: x.to_vec() });
        }
        let u = noise_direction(&self.noise, x, &exact, &mut self.rng);
        // Rounding in `∇f + Δu` can overshoot Δ by about ε‖∇f‖; shorten the step until the
        // bound holds for the stored vectors.
        let mut step = self.delta;
        let inexact = loop {
            let mut g = exact.clone();
            vector::axpy(step, &u, &mut g);
            let excess = vector::dist(&g, &exact) - self.delta;
            if excess <= 0.0 {
                break g;
            }
            step = (step - 2.0 * excess).max(0.0);
        };
        Ok(GradientSample { exact, inexact })
    }

    pub fn inexact_gradient(&mut self, x: &[f64]) -> Result<Vector, OracleError> {
        self.query_gradient(x).map(|s| s.inexact)
    }

    pub fn inexact_value(&mut self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.objective.dim());
        self.value_queries += 1;
        let eta = self.rng.symmetric_unit();
        let f = self.objective.value(x);
        // Same guard as for gradients: keep |f̃ − f| ≤ δ after rounding.
        let mut step = self.small_delta * eta;
        loop {
            let v = f + step;
            let excess = (v - f).abs() - self.small_delta;
            if excess <= 0.0 || !excess.is_finite() {
                return v;
            }
            step -= step.signum() * 2.0 * excess;
        }
    }

    /// Exact value, for instrumentation only; not counted as a query.
    pub fn exact_value(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }
}
