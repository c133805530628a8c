use alloc::format;
use alloc::vec::Vec;

use crate::error::ConfigError;
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::vector::Vector;

/// `f(x) = ½ Σ dⱼ xⱼ²` with `dⱼ ≥ 0`.
///
/// `L = max dⱼ`, `μ = min{dⱼ : dⱼ > 0}` and `f* = 0`; the minimizers are all points whose
/// coordinates with `dⱼ > 0` vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDiag {
    coeffs: Vec<f64>,
    mu: f64,
    lipschitz: f64,
}

impl QuadraticDiag {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, ConfigError> {
        if coeffs.is_empty() {
            return Err(ConfigError::InvalidDimension(0));
        }
        if coeffs.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(ConfigError::Invalid(
                "quadratic coefficients must be finite and nonnegative".into(),
            ));
        }
        let lipschitz = coeffs.iter().copied().fold(0.0, f64::max);
        if lipschitz == 0.0 {
            return Err(ConfigError::Invalid(
                "at least one quadratic coefficient must be positive".into(),
            ));
        }
        let mu = coeffs
            .iter()
            .copied()
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            coeffs,
            mu,
            lipschitz,
        })
    }

    /// `k` leading zero coefficients followed by `n − k` draws uniform on `[μ, L]`; the smallest
    /// draw is then set to exactly `μ` and the largest to exactly `L`.
    pub fn random(
        n: usize,
        k: usize,
        mu: f64,
        lipschitz: f64,
        rng: &mut RngStream,
    ) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::InvalidDimension(0));
        }
        if k >= n {
            return Err(ConfigError::Invalid(format!(
                "zero-eigenvalue count k = {k} must be < n = {n}"
            )));
        }
        if !(mu > 0.0 && mu <= lipschitz && lipschitz.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "need 0 < μ ≤ L, got μ = {mu}, L = {lipschitz}"
            )));
        }
        if n - k == 1 && mu < lipschitz {
            return Err(ConfigError::Invalid(
                "a single nonzero coefficient cannot carry both μ and L with μ < L".into(),
            ));
        }
        let mut coeffs = Vec::with_capacity(n);
        coeffs.resize(k, 0.0);
        coeffs.extend((k..n).map(|_| rng.uniform(mu, lipschitz)));
        let tail = &mut coeffs[k..];
        let argmin = index_of(tail, |a, b| a < b);
        let argmax = index_of(tail, |a, b| a > b);
        let argmax = if argmax == argmin {
            (argmin + 1) % tail.len()
        } else {
            argmax
        };
        tail[argmin] = mu;
        tail[argmax] = lipschitz;
        Self::new(coeffs)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn zero_count(&self) -> usize {
        self.coeffs.iter().filter(|d| **d == 0.0).count()
    }

    /// The minimizer closest to `x`: coordinates with `dⱼ > 0` set to zero.
    pub fn nearest_minimizer(&self, x: &[f64]) -> Vector {
        x.iter()
            .zip(&self.coeffs)
            .map(|(xi, d)| if *d > 0.0 { 0.0 } else { *xi })
            .collect()
    }

    /// Distance from `x` to the solution set.
    pub fn dist_to_solutions(&self, x: &[f64]) -> f64 {
        #[allow(unused_imports)] // redundant when std is in the build graph
        use num_traits::Float;
        x.iter()
            .zip(&self.coeffs)
            .filter(|(_, d)| **d > 0.0)
            .map(|(xi, _)| xi * xi)
            .sum::<f64>()
            .sqrt()
    }
}

fn index_of(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

impl Objective for QuadraticDiag {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().zip(&self.coeffs).map(|(xi, d)| d * xi * xi).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        x.iter().zip(&self.coeffs).map(|(xi, d)| d * xi).collect()
    }

    fn f_star(&self) -> Option<f64> {
        Some(0.0)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn pl_mu(&self) -> Option<f64> {
        Some(self.mu)
    }
}
