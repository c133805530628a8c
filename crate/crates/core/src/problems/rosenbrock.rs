use alloc::vec;

use crate::objective::Objective;
use crate::vector::Vector;

/// `f(x) = 100(x₂ − x₁²)² + (x₁ − 1)²`, minimum `0` at `(1, 1)`. The gradient is only locally
/// Lipschitz, so no global `L` is reported.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rosenbrock;

impl Rosenbrock {
    pub const START: [f64; 2] = [1.0, 2.0];
    pub const MINIMIZER: [f64; 2] = [1.0, 1.0];

    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        let a = x[1] - x[0] * x[0];
        let b = x[0] - 1.0;
        100.0 * a * a + b * b
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let a = x[1] - x[0] * x[0];
        vec![-400.0 * x[0] * a + 2.0 * (x[0] - 1.0), 200.0 * a]
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }
}
