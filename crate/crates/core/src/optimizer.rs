//! Grid searches over α for the Gaussian mechanism: minimise the converted
//! cumulative ε at a fixed σ, or minimise σ subject to an ε budget.
//!
//! Both searches are exhaustive over the grid. Grid points whose single-query
//! or cumulative cost is not representable are treated as infeasible and
//! skipped. Ties go to the smaller α.

use serde::{Deserialize, Serialize};

use crate::accounting::{adp_composed_to_approx, rdp_to_approx, ConversionForm, RdpGuarantee};
use crate::error::{check_delta, check_nonneg, check_positive, Error, ErrorKind, Result};
use crate::mechanisms::{gaussian_adp_epsilon, gaussian_rdp_epsilon};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaSearchConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_step: f64,
    pub conversion: ConversionForm,
}

impl Default for AlphaSearchConfig {
    fn default() -> Self {
        Self {
            alpha_min: 2.0,
            alpha_max: 300.0,
            alpha_step: 1.0,
            sigma_min: 1.0,
            sigma_max: 500.0,
            sigma_step: 1.0,
            conversion: ConversionForm::Proof,
        }
    }
}

fn grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step * (1.0 + 1e-12)).floor() as usize;
    (0..=count).map(|i| min + i as f64 * step).collect()
}

impl AlphaSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min > 1.0 + 1e-12) || !self.alpha_min.is_finite() {
            return Err(Error::domain("alpha_min", format!("must be > 1, got {}", self.alpha_min)));
        }
        if !(self.alpha_max >= self.alpha_min) || !self.alpha_max.is_finite() {
            return Err(Error::domain("alpha_max", "must be finite and >= alpha_min"));
        }
        check_positive("alpha_step", self.alpha_step)?;
        check_positive("sigma_min", self.sigma_min)?;
        if !(self.sigma_max >= self.sigma_min) || !self.sigma_max.is_finite() {
            return Err(Error::domain("sigma_max", "must be finite and >= sigma_min"));
        }
        check_positive("sigma_step", self.sigma_step)
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        grid(self.alpha_min, self.alpha_max, self.alpha_step)
    }

    pub fn sigma_grid(&self) -> Vec<f64> {
        grid(self.sigma_min, self.sigma_max, self.sigma_step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub alpha_star: f64,
    /// Minimised quantity: converted ε for the α search, σ for the σ search.
    pub objective: f64,
    pub converted_epsilon: f64,
    pub feasible: bool,
}

fn validate_common(iterations: u64, delta: f64, l2_sensitivity: f64, cfg: &AlphaSearchConfig) -> Result<()> {
    if iterations == 0 {
        return Err(Error::domain("iterations", "must be >= 1"));
    }
    check_delta(delta)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    cfg.validate()
}

/// Converted (ε, δ) cost of `iterations` Gaussian queries accounted with ADP
/// at order `alpha`.
pub fn adp_gaussian_objective(
    iterations: u64,
    sigma: f64,
    delta: f64,
    l2_sensitivity: f64,
    alpha: f64,
    form: ConversionForm,
) -> Result<f64> {
    let eps = gaussian_adp_epsilon(sigma, l2_sensitivity, alpha)?;
    Ok(adp_composed_to_approx(eps, iterations, alpha, delta, form)?.epsilon)
}

/// Converted (ε, δ) cost of `iterations` Gaussian queries accounted with RDP
/// at order `alpha`.
pub fn rdp_gaussian_objective(
    iterations: u64,
    sigma: f64,
    delta: f64,
    l2_sensitivity: f64,
    alpha: f64,
) -> Result<f64> {
    let per_query = gaussian_rdp_epsilon(sigma, l2_sensitivity, alpha)?;
    let g = RdpGuarantee::new(alpha, iterations as f64 * per_query)?;
    Ok(rdp_to_approx(g, delta)?.epsilon)
}

/// Maps numeric failures to `None` so the caller can skip the grid point.
fn feasible(value: Result<f64>) -> Result<Option<f64>> {
    match value {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(e) if e.kind() == ErrorKind::Numeric => Ok(None),
        Err(e) => Err(e),
    }
}

fn argmin_over_alpha(
    cfg: &AlphaSearchConfig,
    mut objective: impl FnMut(f64) -> Result<f64>,
) -> Result<OptimizationResult> {
    let mut best: Option<(f64, f64)> = None;
    for alpha in cfg.alpha_grid() {
        if let Some(value) = feasible(objective(alpha))? {
            if best.is_none_or(|(_, b)| value < b) {
                best = Some((alpha, value));
            }
        }
    }
    let (alpha_star, value) = best.ok_or(Error::NoFeasibleAlpha)?;
    Ok(OptimizationResult {
        alpha_star,
        objective: value,
        converted_epsilon: value,
        feasible: true,
    })
}

/// α minimising the converted cumulative ε of `iterations` Gaussian queries
/// with noise `sigma`.
pub fn find_alpha_min_epsilon(
    iterations: u64,
    sigma: f64,
    delta: f64,
    l2_sensitivity: f64,
    cfg: &AlphaSearchConfig,
) -> Result<OptimizationResult> {
    validate_common(iterations, delta, l2_sensitivity, cfg)?;
    check_positive("sigma", sigma)?;
    argmin_over_alpha(cfg, |alpha| {
        adp_gaussian_objective(iterations, sigma, delta, l2_sensitivity, alpha, cfg.conversion)
    })
}

/// RDP counterpart of [`find_alpha_min_epsilon`], used for the baseline curves.
pub fn find_rdp_alpha_min_epsilon(
    iterations: u64,
    sigma: f64,
    delta: f64,
    l2_sensitivity: f64,
    cfg: &AlphaSearchConfig,
) -> Result<OptimizationResult> {
    validate_common(iterations, delta, l2_sensitivity, cfg)?;
    check_positive("sigma", sigma)?;
    argmin_over_alpha(cfg, |alpha| {
        rdp_gaussian_objective(iterations, sigma, delta, l2_sensitivity, alpha)
    })
}

/// Smallest σ on the grid, together with its α, whose converted cumulative
/// ε stays within `epsilon_bound`.
///
/// For each α the σ grid is walked upwards, stopping at the first feasible σ
/// or as soon as σ reaches the best value found so far.
pub fn find_alpha_min_sigma(
    iterations: u64,
    epsilon_bound: f64,
    delta: f64,
    l2_sensitivity: f64,
    cfg: &AlphaSearchConfig,
) -> Result<OptimizationResult> {
    validate_common(iterations, delta, l2_sensitivity, cfg)?;
    check_positive("epsilon_bound", epsilon_bound)?;
    let sigmas = cfg.sigma_grid();
    let mut best: Option<(f64, f64, f64)> = None;
    for alpha in cfg.alpha_grid() {
        for &sigma in &sigmas {
            if best.is_some_and(|(_, s, _)| sigma >= s) {
                break;
            }
            let value = feasible(adp_gaussian_objective(
                iterations,
                sigma,
                delta,
                l2_sensitivity,
                alpha,
                cfg.conversion,
            ))?;
            if let Some(eps) = value.filter(|e| *e <= epsilon_bound) {
                best = Some((alpha, sigma, eps));
                break;
            }
        }
    }
    let (alpha_star, sigma, eps) = best.ok_or(Error::NoFeasibleSigma {
        bound: epsilon_bound,
    })?;
    Ok(OptimizationResult {
        alpha_star,
        objective: sigma,
        converted_epsilon: eps,
        feasible: true,
    })
}

/// Smallest grid σ meeting `epsilon_bound` at a fixed α, if any.
pub fn min_sigma_at_alpha(
    iterations: u64,
    epsilon_bound: f64,
    delta: f64,
    l2_sensitivity: f64,
    alpha: f64,
    cfg: &AlphaSearchConfig,
) -> Result<Option<f64>> {
    validate_common(iterations, delta, l2_sensitivity, cfg)?;
    check_positive("epsilon_bound", epsilon_bound)?;
    for sigma in cfg.sigma_grid() {
        let value = feasible(adp_gaussian_objective(
            iterations,
            sigma,
            delta,
            l2_sensitivity,
            alpha,
            cfg.conversion,
        ))?;
        if value.is_some_and(|e| e <= epsilon_bound) {
            return Ok(Some(sigma));
        }
    }
    Ok(None)
}
