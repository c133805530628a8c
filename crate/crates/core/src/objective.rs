//! The objective interface and finite-difference validation.

use alloc::vec;
use alloc::vec::Vec;

use crate::vector::{self, Vector};

/// A smooth objective `f: ℝⁿ → ℝ` with an exact gradient and whatever constants are known.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vector;

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }

    /// Known minimum value `f*`.
    fn f_star(&self) -> Option<f64> {
        None
    }

    /// Global Lipschitz constant of the gradient.
    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// Polyak–Łojasiewicz modulus: `f(x) − f* ≤ ‖∇f(x)‖² / (2μ)`.
    fn pl_mu(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vector {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vector) {
        (**self).value_and_gradient(x)
    }
    fn f_star(&self) -> Option<f64> {
        (**self).f_star()
    }
    fn lipschitz(&self) -> Option<f64> {
        (**self).lipschitz()
    }
    fn pl_mu(&self) -> Option<f64> {
        (**self).pl_mu()
    }
}

/// Default central-difference step at `x`: `1e-6·max(1, ‖x‖)`.
pub fn default_fd_step(x: &[f64]) -> f64 {
    1e-6 * vector::norm(x).max(1.0)
}

/// Central differences `(f(x+h·eᵢ) − f(x−h·eᵢ)) / (2h)` for every coordinate.
pub fn finite_diff_gradient<O: Objective + ?Sized>(objective: &O, x: &[f64], h: f64) -> Vector {
    debug_assert!(h > 0.0);
    let mut probe: Vec<f64> = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = objective.value(&probe);
        probe[i] = xi - h;
        let fm = objective.value(&probe);
        probe[i] = xi;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Outcome of comparing the analytic gradient with central differences at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// `‖∇f − ∇_fd f‖ / max(1, ‖∇f‖)`
    pub rel_error: f64,
    pub grad_norm: f64,
}

impl GradientCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.rel_error <= tol
    }
}

pub fn gradient_check<O: Objective + ?Sized>(objective: &O, x: &[f64]) -> GradientCheck {
    let g = objective.gradient(x);
    let fd = finite_diff_gradient(objective, x, default_fd_step(x));
    let grad_norm = vector::norm(&g);
    GradientCheck {
        rel_error: vector::dist(&g, &fd) / grad_norm.max(1.0),
        grad_norm,
    }
}
