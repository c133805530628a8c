use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use crate::error::ConfigError;
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::vector::{self, Vector};

const POWER_ITER_TOL: f64 = 1e-10;
const POWER_ITER_MAX: usize = 100_000;

/// Feature matrix (rows `wᵢ ∈ ℝⁿ`) and labels `yᵢ ∈ {−1, +1}` for logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegData {
    n: usize,
    m: usize,
    /// `m × n`, row-major.
    features: Vec<f64>,
    labels: Vec<f64>,
    /// Orthonormal basis vectors spanning the rows, when the data was generated.
    basis: Vec<Vec<f64>>,
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl LogRegData {
    /// Synthetic data whose loss has a finite (but non-unique when `k < n`) minimizer.
    ///
    /// 1. `W_B ∈ ℝⁿˣᵏ` with orthonormal columns (Gram–Schmidt on a Gaussian matrix).
    /// 2. `W̃ = W_B Vᵀ ∈ ℝⁿˣ⁽ᵐ⁻²ᵏ⁾` for a Gaussian `V ∈ ℝ⁽ᵐ⁻²ᵏ⁾ˣᵏ`.
    /// 3. Gaussian `x₀`; `ỹ = sign(W̃ᵀx₀)`, `y₁ = sign(W_Bᵀx₀)` with `sign(0) = +1`.
    /// 4. `y = [y₁ | −y₁ | ỹ]`.
    /// 5. Samples are the columns of `[W_B | W_B | W̃]`, so `rank W = k`.
    pub fn generate(n: usize, m: usize, k: usize, rng: &mut RngStream) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::InvalidDimension(0));
        }
        if k == 0 || 2 * k > m || k > n {
            return Err(ConfigError::Invalid(format!(
                "need 1 ≤ k ≤ min(n, m/2), got n = {n}, m = {m}, k = {k}"
            )));
        }
        let basis = orthonormal_columns(n, k, rng);
        let coeffs: Vec<Vec<f64>> = (0..m - 2 * k)
            .map(|_| (0..k).map(|_| rng.standard_normal()).collect())
            .collect();
        let x0: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();

        let mut features = Vec::with_capacity(m * n);
        let mut labels = Vec::with_capacity(m);
        for b in &basis {
            features.extend_from_slice(b);
            labels.push(sign(vector::dot(b, &x0)));
        }
        for i in 0..k {
            features.extend_from_slice(&basis[i]);
            labels.push(-labels[i]);
        }
        for c in &coeffs {
            let mut w = vec![0.0; n];
            for (cj, b) in c.iter().zip(&basis) {
                vector::axpy(*cj, b, &mut w);
            }
            labels.push(sign(vector::dot(&w, &x0)));
            features.extend_from_slice(&w);
        }
        Ok(Self {
            n,
            m,
            features,
            labels,
            basis,
        })
    }

    /// Wraps explicit data; `features` is `m × n` row-major with `m = labels.len()`.
    pub fn from_parts(n: usize, features: Vec<f64>, labels: Vec<f64>) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::InvalidDimension(0));
        }
        let m = labels.len();
        if m == 0 || features.len() != m * n {
            return Err(ConfigError::Invalid(format!(
                "expected {m}×{n} features, got {} values",
                features.len()
            )));
        }
        if labels.iter().any(|y| *y != 1.0 && *y != -1.0) {
            return Err(ConfigError::Invalid("labels must be ±1".into()));
        }
        if !vector::is_finite(&features) {
            return Err(ConfigError::Invalid("features must be finite".into()));
        }
        Ok(Self {
            n,
            m,
            features,
            labels,
            basis: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.n)
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.features.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `L = λ_max(WᵀW) / (4m)`, with `λ_max` from power iteration.
    pub fn lipschitz(&self) -> f64 {
        self.lambda_max_gram() / (4.0 * self.m as f64)
    }

    /// Largest eigenvalue of `WᵀW` by power iteration, stopped when the Rayleigh quotient
    /// changes by less than `1e-10` relative.
    pub fn lambda_max_gram(&self) -> f64 {
        let mut start = RngStream::new(0x9e37_79b9, 0);
        let mut v: Vec<f64> = (0..self.n).map(|_| start.standard_normal()).collect();
        let nv = vector::norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut lambda = 0.0;
        for _ in 0..POWER_ITER_MAX {
            let w = self.gram_apply(&v);
            let rayleigh = vector::dot(&v, &w);
            let nw = vector::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            v = vector::scaled(1.0 / nw, &w);
            if (rayleigh - lambda).abs() <= POWER_ITER_TOL * rayleigh.abs() {
                return rayleigh;
            }
            lambda = rayleigh;
        }
        lambda
    }

    fn gram_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for row in self.rows() {
            let t = vector::dot(row, v);
            vector::axpy(t, row, &mut out);
        }
        out
    }
}

fn orthonormal_columns(n: usize, k: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = vector::dot(&v, b);
                vector::axpy(-c, b, &mut v);
            }
        }
        let nv = vector::norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    basis
}

/// `log(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `f(x) = (1/m) Σ log(1 + exp(−yᵢ⟨wᵢ, x⟩))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    data: LogRegData,
    lipschitz: f64,
}

impl LogisticRegression {
    pub fn new(data: LogRegData) -> Self {
        let lipschitz = data.lipschitz();
        Self { data, lipschitz }
    }

    pub fn data(&self) -> &LogRegData {
        &self.data
    }

    pub fn eval_grad(&self, x: &[f64]) -> (f64, Vector) {
        self.value_and_gradient(x)
    }
}

impl Objective for LogisticRegression {
    fn dim(&self) -> usize {
        self.data.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        let total: f64 = self
            .data
            .rows()
            .zip(&self.data.labels)
            .map(|(w, y)| softplus(-y * vector::dot(w, x)))
            .sum();
        total / self.data.m as f64
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vector) {
        let inv_m = 1.0 / self.data.m as f64;
        let mut f = 0.0;
        let mut g = vec![0.0; self.data.n];
        for (w, y) in self.data.rows().zip(&self.data.labels) {
            let z = -y * vector::dot(w, x);
            f += softplus(z);
            vector::axpy(-y * logistic(z) * inv_m, w, &mut g);
        }
        (f * inv_m, g)
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LogRegData {
        LogRegData::generate(12, 30, 3, &mut RngStream::new(21, 0)).unwrap()
    }

    #[test]
    fn paired_labels_and_rows() {
        let d = small();
        let k = d.k();
        for i in 0..k {
            assert_eq!(d.labels()[i + k], -d.labels()[i]);
            assert_eq!(d.row(i), d.row(i + k));
        }
        assert!(d.labels().iter().all(|y| y.abs() == 1.0));
    }

    #[test]
    fn basis_is_orthonormal() {
        let d = small();
        for (i, a) in d.basis().iter().enumerate() {
            for (j, b) in d.basis().iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vector::dot(a, b) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn value_at_origin_is_log_two() {
        let p = LogisticRegression::new(small());
        assert!((p.value(&[0.0; 12]) - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn single_unit_row_lipschitz() {
        let d = LogRegData::from_parts(3, vec![0.0, 1.0, 0.0], vec![1.0]).unwrap();
        assert!((d.lipschitz() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_scales_quadratically() {
        let d = small();
        let l = d.lipschitz();
        let l3 = d.scaled(3.0).lipschitz();
        assert!((l3 / l - 9.0).abs() < 1e-8, "{l} {l3}");
    }

    #[test]
    fn softplus_extremes() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0 && softplus(-1000.0) < 1e-300);
        assert!(logistic(-1000.0) >= 0.0 && logistic(1000.0) == 1.0);
    }

    #[test]
    fn invalid_sizes() {
        let mut rng = RngStream::new(0, 0);
        assert!(LogRegData::generate(10, 10, 6, &mut rng).is_err());
        assert!(LogRegData::generate(3, 100, 4, &mut rng).is_err());
        assert!(LogRegData::from_parts(2, vec![1.0], vec![1.0]).is_err());
        assert!(LogRegData::from_parts(1, vec![1.0], vec![0.5]).is_err());
    }
}
