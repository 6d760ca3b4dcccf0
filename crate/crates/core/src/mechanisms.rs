//! Per-query privacy cost of the randomized-response, Laplace and Gaussian
//! mechanisms, in alpha-divergence form and under the usual baselines.
//!
//! Worst-case adjacency is assumed throughout: randomized response flips a
//! predicate from 1 to 0, and the additive-noise mechanisms are shifted by
//! exactly their sensitivity. Vector-valued queries enter only through the
//! norm of the shift, so callers pass the ℓ1 or ℓ2 sensitivity directly.

use serde::{Deserialize, Serialize};

use crate::error::{
    check_alpha, check_delta, check_exponent, check_nonneg, check_positive, Error, Result,
};

/// A noise mechanism together with the parameters that fix its privacy cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "snake_case")]
pub enum MechanismSpec {
    /// Report the true bit with probability `p`, the flipped bit otherwise.
    RandomizedResponse { p: f64 },
    Laplace { scale_b: f64, l1_sensitivity: f64 },
    Gaussian { sigma: f64, l2_sensitivity: f64 },
}

impl MechanismSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MechanismSpec::RandomizedResponse { p } => check_probability("p", p),
            MechanismSpec::Laplace {
                scale_b,
                l1_sensitivity,
            } => {
                check_positive("scale_b", scale_b)?;
                check_nonneg("l1_sensitivity", l1_sensitivity)
            }
            MechanismSpec::Gaussian {
                sigma,
                l2_sensitivity,
            } => {
                check_positive("sigma", sigma)?;
                check_nonneg("l2_sensitivity", l2_sensitivity)
            }
        }
    }

    /// Single-query ADP cost at order `alpha`.
    pub fn adp_epsilon(&self, alpha: f64) -> Result<f64> {
        match *self {
            MechanismSpec::RandomizedResponse { p } => rr_adp_epsilon(p, alpha),
            MechanismSpec::Laplace {
                scale_b,
                l1_sensitivity,
            } => laplace_adp_epsilon(scale_b, l1_sensitivity, alpha),
            MechanismSpec::Gaussian {
                sigma,
                l2_sensitivity,
            } => gaussian_adp_epsilon(sigma, l2_sensitivity, alpha),
        }
    }

    /// Baseline cost: pure ε for randomized response and Laplace, the
    /// classical (ε, δ) calibration for Gaussian.
    pub fn baseline_epsilon(&self, delta: f64) -> Result<f64> {
        match *self {
            MechanismSpec::RandomizedResponse { p } => rr_pure_epsilon(p),
            MechanismSpec::Laplace {
                scale_b,
                l1_sensitivity,
            } => laplace_pure_epsilon(scale_b, l1_sensitivity),
            MechanismSpec::Gaussian {
                sigma,
                l2_sensitivity,
            } => gaussian_approx_epsilon(sigma, l2_sensitivity, delta),
        }
    }
}

fn check_probability(field: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(field, format!("must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// `(p^α (1-p)^{1-α} + (1-p)^α p^{1-α} - 1) / (α(α-1))`.
///
/// Evaluated term by term in the same order as the discrete alpha divergence
/// of the pair `(p, 1-p)` against `(1-p, p)`, so the two agree bit for bit.
pub fn rr_adp_epsilon(p: f64, alpha: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_alpha(alpha)?;
    let q = 1.0 - p;
    let sum = p.powf(alpha) * q.powf(1.0 - alpha) + q.powf(alpha) * p.powf(1.0 - alpha);
    Ok((sum - 1.0) / (alpha * (alpha - 1.0)))
}

pub fn rr_pure_epsilon(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    let q = 1.0 - p;
    Ok((p.max(q) / p.min(q)).ln())
}

/// Laplace cost with shift `μ = Δf₁`:
/// `e^{(α-1)μ/b}/((α-1)(2α-1)) + e^{-αμ/b}/(α(2α-1)) - 1/(α(α-1))`.
///
/// The constant terms cancel exactly, so the sum is evaluated through
/// `expm1` and returns exactly 0 for zero sensitivity.
pub fn laplace_adp_epsilon(scale_b: f64, l1_sensitivity: f64, alpha: f64) -> Result<f64> {
    check_positive("scale_b", scale_b)?;
    check_nonneg("l1_sensitivity", l1_sensitivity)?;
    check_alpha(alpha)?;
    let t = l1_sensitivity / scale_b;
    check_exponent((alpha - 1.0) * t)?;
    let two_a_minus_one = 2.0 * alpha - 1.0;
    let up = ((alpha - 1.0) * t).exp_m1() / ((alpha - 1.0) * two_a_minus_one);
    let down = (-alpha * t).exp_m1() / (alpha * two_a_minus_one);
    Ok(up + down)
}

pub fn laplace_pure_epsilon(scale_b: f64, l1_sensitivity: f64) -> Result<f64> {
    check_positive("scale_b", scale_b)?;
    check_nonneg("l1_sensitivity", l1_sensitivity)?;
    Ok(l1_sensitivity / scale_b)
}

/// `(exp(α(α-1)Δ²/(2σ²)) - 1) / (α(α-1))`.
pub fn gaussian_adp_epsilon(sigma: f64, l2_sensitivity: f64, alpha: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    check_alpha(alpha)?;
    let a = alpha * (alpha - 1.0);
    let exponent = a * l2_sensitivity * l2_sensitivity / (2.0 * sigma * sigma);
    check_exponent(exponent)?;
    Ok(exponent.exp_m1() / a)
}

/// Smallest σ for which the Gaussian mechanism is `(α, ε)`-ADP.
pub fn gaussian_sigma_for_adp(alpha: f64, epsilon: f64, l2_sensitivity: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_positive("epsilon", epsilon)?;
    check_positive("l2_sensitivity", l2_sensitivity)?;
    let a = alpha * (alpha - 1.0);
    Ok((a * l2_sensitivity * l2_sensitivity / (2.0 * (a * epsilon).ln_1p())).sqrt())
}

/// Rényi-DP cost `αΔ²/(2σ²)` of one Gaussian query.
pub fn gaussian_rdp_epsilon(sigma: f64, l2_sensitivity: f64, alpha: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    check_alpha(alpha)?;
    Ok(alpha * l2_sensitivity * l2_sensitivity / (2.0 * sigma * sigma))
}

/// zCDP parameter `ρ = Δ²/(2σ²)` of one Gaussian query.
pub fn gaussian_zcdp_rho(sigma: f64, l2_sensitivity: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    Ok(l2_sensitivity * l2_sensitivity / (2.0 * sigma * sigma))
}

/// Per-query ε of the classical Gaussian calibration
/// `σ = Δ·sqrt(2 ln(1.25/δ))/ε`, solved for ε.
pub fn gaussian_approx_epsilon(sigma: f64, l2_sensitivity: f64, delta: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    check_delta(delta)?;
    Ok(l2_sensitivity * (2.0 * (1.25 / delta).ln()).sqrt() / sigma)
}
