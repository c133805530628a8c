use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ConfigError;
use crate::objective::Objective;
use crate::vector::Vector;

/// `f(x) = ¼(1 − x₁)² + Σᵢ₌₁ⁿ⁻¹ (xᵢ₊₁ − 2xᵢ² + 1)²`, i.e. `‖g(x)‖²` for the residuals
/// `g₁ = ½(x₁ − 1)`, `gᵢ = xᵢ − 2xᵢ₋₁² + 1`. Minimum `0` at the all-ones vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NesterovSkokov {
    n: usize,
}

impl NesterovSkokov {
    pub fn new(n: usize) -> Result<Self, ConfigError> {
        if n < 2 {
            return Err(ConfigError::Invalid(format!(
                "Nesterov–Skokov needs n ≥ 2, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// `(−1, 1, …, 1)`, at distance 2 from the minimizer.
    pub fn start_point(&self) -> Vector {
        let mut x = vec![1.0; self.n];
        x[0] = -1.0;
        x
    }

    pub fn minimizer(&self) -> Vector {
        vec![1.0; self.n]
    }

    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }

    /// Diagonal and sub-diagonal of the tridiagonal matrix `JJᵀ`, `J` the Jacobian of `g`.
    ///
    /// `J` is lower bidiagonal with `J₁₁ = ½`, `Jᵢᵢ = 1`, `Jᵢ,ᵢ₋₁ = −4xᵢ₋₁`.
    pub fn jjt_tridiagonal(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n - 1);
        diag.push(0.25);
        for i in 1..n {
            let s = -4.0 * x[i - 1];
            diag.push(s * s + 1.0);
            // (JJᵀ)ᵢ,ᵢ₋₁ = Jᵢ,ᵢ₋₁·Jᵢ₋₁,ᵢ₋₁
            off.push(s * if i == 1 { 0.5 } else { 1.0 });
        }
        (diag, off)
    }

    /// Leading principal minors `f₁, …, fₙ` of `JJᵀ` by the three-term recursion
    /// `fₖ = aₖ fₖ₋₁ − bₖ₋₁² fₖ₋₂` with `f₀ = 1`.
    ///
    /// For `k ≥ 3` this is `fₖ = (16xₖ₋₁² + 1) fₖ₋₁ − 16xₖ₋₁² fₖ₋₂`, and `f₁ = f₂ = ¼`.
    pub fn minor_sequence(&self, x: &[f64]) -> Vec<f64> {
        let (a, b) = self.jjt_tridiagonal(x);
        let mut minors = Vec::with_capacity(self.n);
        let (mut prev2, mut prev1) = (1.0, a[0]);
        minors.push(prev1);
        for k in 1..self.n {
            let next = a[k] * prev1 - b[k - 1] * b[k - 1] * prev2;
            minors.push(next);
            prev2 = prev1;
            prev1 = next;
        }
        minors
    }

    /// True when the minors are positive and non-decreasing, which makes `JJᵀ ≻ 0`.
    ///
    /// The recursion amplifies rounding by up to `aₖ` per step, so monotonicity is tested up to
    /// a forward error bound `4kε·Π aⱼ·|fₖ|`.
    pub fn minors_positive(&self, x: &[f64]) -> bool {
        let m = self.minor_sequence(x);
        let (a, _) = self.jjt_tridiagonal(x);
        let mut growth = 1.0;
        m[0] > 0.0
            && m.windows(2).enumerate().all(|(i, w)| {
                growth *= a[i + 1].max(1.0);
                let tol = 4.0 * (i + 2) as f64 * f64::EPSILON * growth * w[0].abs();
                w[1] > 0.0 && w[1] >= w[0] - tol
            })
    }
}

impl Objective for NesterovSkokov {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let head = 1.0 - x[0];
        let mut f = 0.25 * head * head;
        for i in 0..self.n - 1 {
            let r = x[i + 1] - 2.0 * x[i] * x[i] + 1.0;
            f += r * r;
        }
        f
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let mut g = vec![0.0; self.n];
        g[0] = -0.5 * (1.0 - x[0]);
        for i in 0..self.n - 1 {
            let r = x[i + 1] - 2.0 * x[i] * x[i] + 1.0;
            g[i] += 2.0 * r * (-4.0 * x[i]);
            g[i + 1] += 2.0 * r;
        }
        g
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }
}
