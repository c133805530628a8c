//! Perturbation directions for the inexact gradient oracle.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


use crate::error::ConfigError;
use crate::rng::RngStream;
use crate::vector::{self, Vector};

const TINY_NORM: f64 = 1e-300;

/// The rule producing the direction `u` (with `‖u‖ ≤ 1`) that is scaled by `Δ` and added to
/// the exact gradient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NoiseModel {
    /// `u = 0`.
    None,
    /// A fresh uniform sample from the unit sphere at every query.
    RandomSphere,
    /// `u = −∇f/‖∇f‖`, or zero when the gradient vanishes.
    Antigradient,
    /// A fixed unit vector. Build it with [`NoiseModel::constant`].
    Constant(Vec<f64>),
    /// `u = −e₁`: only the first partial derivative is biased.
    FirstComponentBias,
}

impl NoiseModel {
    /// Normalizes `v`; rejects zero or non-finite input.
    pub fn constant(v: &[f64]) -> Result<Self, ConfigError> {
        if v.is_empty() {
            return Err(ConfigError::InvalidDimension(0));
        }
        let n = vector::norm(v);
        if !n.is_finite() || n < TINY_NORM {
            return Err(ConfigError::Invalid(
                "constant noise vector must be finite and nonzero".into(),
            ));
        }
        Ok(NoiseModel::Constant(vector::divided(v, n)))
    }

    /// A unit vector along the last coordinate axis.
    pub fn constant_last_axis(dim: usize) -> Result<Self, ConfigError> {
        if dim == 0 {
            return Err(ConfigError::InvalidDimension(0));
        }
        let mut v = vec![0.0; dim];
        v[dim - 1] = 1.0;
        Ok(NoiseModel::Constant(v))
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::None => "none",
            NoiseModel::RandomSphere => "random",
            NoiseModel::Antigradient => "antigradient",
            NoiseModel::Constant(_) => "constant",
            NoiseModel::FirstComponentBias => "first-component",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Constant(v) => write!(f, "constant{v:?}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Uniform sample from the unit sphere in `ℝ^dim` (normalized Gaussian vector).
pub fn sample_unit_sphere(dim: usize, rng: &mut RngStream) -> Result<Vector, ConfigError> {
    if dim == 0 {
        return Err(ConfigError::InvalidDimension(0));
    }
    loop {
        let g: Vector = (0..dim).map(|_| rng.standard_normal()).collect();
        let n = vector::norm(&g);
        if n >= TINY_NORM {
            return Ok(vector::divided(&g, n));
        }
    }
}

/// The perturbation direction of `model` at `x`, given the exact gradient `grad` there.
pub fn noise_direction(model: &NoiseModel, x: &[f64], grad: &[f64], rng: &mut RngStream) -> Vector {
    let dim = x.len();
    match model {
        NoiseModel::None => vec![0.0; dim],
        NoiseModel::RandomSphere => {
            sample_unit_sphere(dim.max(1), rng).unwrap_or_else(|_| vec![0.0; dim])
        }
        NoiseModel::Antigradient => {
            let n = vector::norm(grad);
            if n < TINY_NORM || !n.is_finite() {
                vec![0.0; dim]
            } else {
                vector::divided(grad, -n)
            }
        }
        NoiseModel::Constant(v) => v.clone(),
        NoiseModel::FirstComponentBias => {
            let mut u = vec![0.0; dim];
            if let Some(first) = u.first_mut() {
                *first = -1.0;
            }
            u
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_sphere_is_plus_minus_one() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..50 {
            let u = sample_unit_sphere(1, &mut rng).unwrap();
            assert!(u[0] == 1.0 || u[0] == -1.0);
        }
    }

    #[test]
    fn sphere_sample_has_unit_norm() {
        let mut rng = RngStream::new(42, 0);
        let u = sample_unit_sphere(5, &mut rng).unwrap();
        assert!((vector::norm(&u) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(
            sample_unit_sphere(0, &mut rng),
            Err(ConfigError::InvalidDimension(0))
        );
    }

    #[test]
    fn sphere_mean_is_near_zero() {
        let mut rng = RngStream::new(11, 0);
        let mut mean = [0.0; 3];
        let draws = 10_000;
        for _ in 0..draws {
            let u = sample_unit_sphere(3, &mut rng).unwrap();
            for (m, ui) in mean.iter_mut().zip(&u) {
                *m += ui / draws as f64;
            }
        }
        for m in mean {
            assert!(m.abs() <= 0.05, "component mean {m}");
        }
    }

    #[test]
    fn antigradient_normalizes() {
        let mut rng = RngStream::new(0, 0);
        let u = noise_direction(&NoiseModel::Antigradient, &[0.0, 0.0], &[3.0, 4.0], &mut rng);
        assert!((u[0] + 0.6).abs() < 1e-15 && (u[1] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn antigradient_at_stationary_point_is_zero() {
        let mut rng = RngStream::new(0, 0);
        let u = noise_direction(&NoiseModel::Antigradient, &[1.0, 2.0], &[0.0, 0.0], &mut rng);
        assert_eq!(u, vec![0.0, 0.0]);
    }

    #[test]
    fn constant_model_ignores_point() {
        let mut rng = RngStream::new(0, 0);
        let m = NoiseModel::constant(&[1.0, 0.0]).unwrap();
        for x in [[0.0, 0.0], [5.0, -3.0]] {
            assert_eq!(noise_direction(&m, &x, &[1.0, 1.0], &mut rng), vec![1.0, 0.0]);
        }
    }

    #[test]
    fn constant_model_normalizes_or_rejects() {
        assert_eq!(
            NoiseModel::constant(&[3.0, 4.0]).unwrap(),
            NoiseModel::Constant(vec![0.6, 0.8])
        );
        assert!(NoiseModel::constant(&[0.0, 0.0]).is_err());
        assert!(NoiseModel::constant(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn first_component_bias_points_against_first_axis() {
        let mut rng = RngStream::new(0, 0);
        let u = noise_direction(&NoiseModel::FirstComponentBias, &[1.0, 1.0, 1.0], &[0.0; 3], &mut rng);
        assert_eq!(u, vec![-1.0, 0.0, 0.0]);
    }
}
