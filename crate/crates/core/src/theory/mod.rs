//! Iteration budgets, distance bounds and trajectory certificates.

mod bounds;
mod certificates;

pub use bounds::{
    bounds_report, budget_adaptive, budget_adaptive_delta, budget_const, budget_no_pl,
    dist_bound_adaptive, dist_bound_const, dist_bounds_no_mu, gap_guarantees, BoundsReport,
};
pub use certificates::{verify_certificates, CertificateCheck, CertificateMode, CertificateReport};

use alloc::format;

use crate::error::TheoryError;

/// Problem and noise constants entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoryInputs {
    /// Smoothness constant `L`.
    pub l: f64,
    /// PL modulus `μ`, when known.
    pub mu: Option<f64>,
    /// Gradient error `Δ`.
    pub delta: f64,
    /// Function-value error `δ`.
    pub small_delta: f64,
    /// Initial gap `f(x₀) − f*`.
    pub gap0: f64,
    pub l_min: Option<f64>,
    /// `γ = L / L_min`, present exactly when `l_min` is.
    pub gamma: Option<f64>,
}

impl TheoryInputs {
    pub fn new(l: f64, delta: f64, gap0: f64) -> Self {
        Self {
            l,
            mu: None,
            delta,
            small_delta: 0.0,
            gap0,
            l_min: None,
            gamma: None,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_small_delta(mut self, small_delta: f64) -> Self {
        self.small_delta = small_delta;
        self
    }

    /// Sets `L_min` and `γ = L/L_min` together.
    pub fn with_l_min(mut self, l_min: f64) -> Self {
        self.l_min = Some(l_min);
        self.gamma = Some(self.l / l_min);
        self
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let bad = |what: &str, v: f64| {
            Err(TheoryError::InvalidInput(format!("{what} out of range: {v}")))
        };
        if !(self.l.is_finite() && self.l > 0.0) {
            return bad("L", self.l);
        }
        if let Some(mu) = self.mu {
            if !(mu.is_finite() && mu > 0.0) {
                return bad("μ", mu);
            }
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad("Δ", self.delta);
        }
        if !(self.small_delta.is_finite() && self.small_delta >= 0.0) {
            return bad("δ", self.small_delta);
        }
        if !(self.gap0.is_finite() && self.gap0 >= 0.0) {
            return bad("gap0", self.gap0);
        }
        match (self.l_min, self.gamma) {
            (None, None) => {}
            (Some(lm), Some(g)) => {
                if !(lm.is_finite() && lm > 0.0) {
                    return bad("L_min", lm);
                }
                if g != self.l / lm {
                    return Err(TheoryError::InvalidInput("γ must equal L / L_min".into()));
                }
            }
            _ => {
                return Err(TheoryError::InvalidInput(
                    "γ and L_min must be given together".into(),
                ))
            }
        }
        Ok(())
    }

    pub(crate) fn require_mu(&self) -> Result<f64, TheoryError> {
        self.mu.ok_or(TheoryError::NotApplicable("μ"))
    }

    pub(crate) fn require_delta(&self) -> Result<f64, TheoryError> {
        if self.delta > 0.0 {
            Ok(self.delta)
        } else {
            Err(TheoryError::InfiniteBudget)
        }
    }
}
