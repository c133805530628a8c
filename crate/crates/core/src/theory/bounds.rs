#[allow(unused_imports)] // redundant when std is in the build graph
use num_traits::Float;

use super::TheoryInputs;
use crate::error::TheoryError;

/// Every bound that applies to a set of inputs; `None` where a required constant is missing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundsReport {
    pub n_star_const: Option<u64>,
    pub n_cap_no_pl: Option<f64>,
    pub gap_guarantee_const: Option<f64>,
    pub dist_bound_const: Option<f64>,
    pub dist_bound_no_mu_a: Option<f64>,
    pub dist_bound_no_mu_b: Option<f64>,
    pub n_star_adaptive: Option<u64>,
    pub n_cap_adaptive_delta: Option<f64>,
    pub gap_guarantee_adaptive: Option<f64>,
    pub dist_bound_adaptive: Option<f64>,
    /// The adaptive distance bound written with `N = n_star_adaptive` and `L_min` explicit.
    pub dist_bound_adaptive_budget: Option<f64>,
}

fn ceil_pos(x: f64) -> u64 {
    if x > 0.0 {
        // Saturating cast.
        x.ceil() as u64
    } else {
        0
    }
}

/// `ln(arg)` clamped at zero.
fn ln_pos(arg: f64) -> f64 {
    if arg > 1.0 {
        arg.ln()
    } else {
        0.0
    }
}

/// `N* = ⌈(L/μ)·ln(μ·gap0/(6Δ²))⌉`, zero when the log argument is at most 1.
pub fn budget_const(inp: &TheoryInputs) -> Result<u64, TheoryError> {
    inp.validate()?;
    let mu = inp.require_mu()?;
    let d = inp.require_delta()?;
    Ok(ceil_pos(inp.l / mu * ln_pos(mu * inp.gap0 / (6.0 * d * d))))
}

/// Strict upper bound `2L·gap0/Δ²` on the stopping iteration without the PL condition.
pub fn budget_no_pl(inp: &TheoryInputs) -> Result<f64, TheoryError> {
    inp.validate()?;
    let d = inp.require_delta()?;
    Ok(2.0 * inp.l * inp.gap0 / (d * d))
}

/// `(7Δ²/μ, 5Δ²/μ)`: the gap at the output point under the constant-step and adaptive rules.
pub fn gap_guarantees(inp: &TheoryInputs) -> Result<(f64, f64), TheoryError> {
    inp.validate()?;
    let mu = inp.require_mu()?;
    let d2 = inp.delta * inp.delta;
    Ok((7.0 * d2 / mu, 5.0 * d2 / mu))
}

/// `‖x̂ − x₀‖ ≤ (2Δ/μ)·√(1 + L/μ)·⌈ln(μ·gap0/(6Δ²))⌉ + 4√(L·gap0)/μ`.
pub fn dist_bound_const(inp: &TheoryInputs) -> Result<f64, TheoryError> {
    inp.validate()?;
    let mu = inp.require_mu()?;
    let d = inp.require_delta()?;
    let steps = ceil_pos(ln_pos(mu * inp.gap0 / (6.0 * d * d))) as f64;
    Ok(2.0 * d / mu * (1.0 + inp.l / mu).sqrt() * steps + 4.0 * (inp.l * inp.gap0).sqrt() / mu)
}

/// Distance bounds without `μ` after `n` steps:
/// (a) `2nΔ/L + 2√n·√(gap0/L)`, (b) `(4 + 2√2)·gap0/Δ` (infinite when `Δ = 0`).
///
/// (b) is (a) evaluated at `n = 2L·gap0/Δ²`.
pub fn dist_bounds_no_mu(inp: &TheoryInputs, n: f64) -> Result<(f64, f64), TheoryError> {
    inp.validate()?;
    if !(n.is_finite() && n >= 0.0) {
        return Err(TheoryError::InvalidInput(alloc::format!("step count {n}")));
    }
    let a = 2.0 * n * inp.delta / inp.l + 2.0 * n.sqrt() * (inp.gap0 / inp.l).sqrt();
    let b = if inp.delta > 0.0 {
        (4.0 + 2.0 * 2.0f64.sqrt()) * inp.gap0 / inp.delta
    } else {
        f64::INFINITY
    };
    Ok((a, b))
}

/// `N* = ⌈(8L/μ)·ln(μ·gap0/Δ²)⌉`, zero when the log argument is at most 1.
pub fn budget_adaptive(inp: &TheoryInputs) -> Result<u64, TheoryError> {
    inp.validate()?;
    let mu = inp.require_mu()?;
    let d = inp.require_delta()?;
    Ok(ceil_pos(8.0 * inp.l / mu * ln_pos(mu * inp.gap0 / (d * d))))
}

/// `2L·gap0/(Δ² − 16Lδ)`, requiring `Δ² > 16Lδ`.
pub fn budget_adaptive_delta(inp: &TheoryInputs) -> Result<f64, TheoryError> {
    inp.validate()?;
    let margin = inp.delta * inp.delta - 16.0 * inp.l * inp.small_delta;
    if margin <= 0.0 {
        return Err(TheoryError::PremiseViolated(alloc::format!(
            "Δ² = {:e} must exceed 16Lδ = {:e}",
            inp.delta * inp.delta,
            16.0 * inp.l * inp.small_delta
        )));
    }
    Ok(2.0 * inp.l * inp.gap0 / margin)
}

/// Adaptive distance bounds with `γ = L/L_min`:
///
/// * `(8Δ/μ)·√(γ²/2 + 4γL/μ)·ln⁺(μ·gap0/Δ²) + 16√(γL·gap0)/μ`
/// * `N·Δ·√(1/(2L_min²) + 4/(μL_min)) + 16√(γL·gap0)/μ` at `N = budget_adaptive`.
pub fn dist_bound_adaptive(inp: &TheoryInputs) -> Result<(f64, f64), TheoryError> {
    inp.validate()?;
    let (l_min, gamma) = match (inp.l_min, inp.gamma) {
        (Some(lm), Some(g)) => (lm, g),
        _ => return Err(TheoryError::NotApplicable("L_min")),
    };
    let mu = inp.require_mu()?;
    let d = inp.require_delta()?;
    let tail = 16.0 * (gamma * inp.l * inp.gap0).sqrt() / mu;
    let first = 8.0 * d / mu
        * (gamma * gamma / 2.0 + 4.0 * gamma * inp.l / mu).sqrt()
        * ln_pos(mu * inp.gap0 / (d * d))
        + tail;
    let n = budget_adaptive(inp)? as f64;
    let second = n * d * (1.0 / (2.0 * l_min * l_min) + 4.0 / (mu * l_min)).sqrt() + tail;
    Ok((first, second))
}

/// Evaluates every applicable bound. `steps` feeds the no-`μ` bound (a); it defaults to
/// `budget_no_pl`.
pub fn bounds_report(inp: &TheoryInputs, steps: Option<f64>) -> Result<BoundsReport, TheoryError> {
    inp.validate()?;
    let mut r = BoundsReport {
        n_star_const: budget_const(inp).ok(),
        n_cap_no_pl: budget_no_pl(inp).ok(),
        n_star_adaptive: budget_adaptive(inp).ok(),
        n_cap_adaptive_delta: budget_adaptive_delta(inp).ok(),
        dist_bound_const: dist_bound_const(inp).ok(),
        ..BoundsReport::default()
    };
    if let Ok((c, a)) = gap_guarantees(inp) {
        r.gap_guarantee_const = Some(c);
        r.gap_guarantee_adaptive = Some(a);
    }
    if let Some(n) = steps.or(r.n_cap_no_pl) {
        if let Ok((a, b)) = dist_bounds_no_mu(inp, n) {
            r.dist_bound_no_mu_a = Some(a);
            r.dist_bound_no_mu_b = b.is_finite().then_some(b);
        }
    }
    if let Ok((a, b)) = dist_bound_adaptive(inp) {
        r.dist_bound_adaptive = Some(a);
        r.dist_bound_adaptive_budget = Some(b);
    }
    Ok(r)
}
