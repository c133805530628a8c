use alloc::format;
use alloc::vec;

use crate::error::ConfigError;
use crate::objective::Objective;
use crate::vector::Vector;

/// `f(x) = ⟨Ax, x⟩` with `A = diag(L, μ, 0)`, `L > μ > 0`.
///
/// Convex but not strongly convex: the third coordinate is free, so a constant gradient error
/// along it drives plain gradient descent off to infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simple3D {
    l: f64,
    mu: f64,
}

impl Simple3D {
    pub fn new(l: f64, mu: f64) -> Result<Self, ConfigError> {
        if !(l.is_finite() && mu > 0.0 && l > mu) {
            return Err(ConfigError::Invalid(format!(
                "need L > μ > 0, got L = {l}, μ = {mu}"
            )));
        }
        Ok(Self { l, mu })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }
}

impl Objective for Simple3D {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.l * x[0] * x[0] + self.mu * x[1] * x[1]
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        vec![2.0 * self.l * x[0], 2.0 * self.mu * x[1], 0.0]
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }

    /// The Hessian is `2A`.
    fn lipschitz(&self) -> Option<f64> {
        Some(2.0 * self.l)
    }

    fn pl_mu(&self) -> Option<f64> {
        Some(2.0 * self.mu)
    }
}
