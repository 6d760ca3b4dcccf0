//! Divergence oracles: alpha, Rényi, Kullback–Leibler and max divergence
//! between finite distributions, and the alpha divergence between two
//! named one-dimensional densities evaluated by adaptive quadrature.
//!
//! These are the reference computations the closed-form mechanism costs are
//! checked against, so they are written directly from the definitions.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, check_positive, Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};

/// Tolerance on the total mass of a distribution and on channel row sums.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("probs", "distribution must have at least one outcome"));
        }
        if let Some(bad) = probs.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain("probs", format!("entry {bad} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::domain("probs", format!("entries sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::domain("weights", "weights must have a positive finite sum"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A row-stochastic matrix: row `i` is the output distribution given input `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(Error::domain("matrix", "channel needs at least one row and one column"));
        }
        for row in &rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::domain("matrix", "entries must be probabilities"));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::domain("matrix", format!("row sums to {total}, not 1")));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityFamily {
    Gaussian,
    Laplace,
}

/// A location-scale density: `scale` is the standard deviation for the
/// Gaussian family and the diversity `b` for the Laplace family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    family: DensityFamily,
    location: f64,
    scale: f64,
}

impl DensitySpec {
    pub fn new(family: DensityFamily, location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::domain("location", "must be finite"));
        }
        check_positive("scale", scale)?;
        Ok(Self {
            family,
            location,
            scale,
        })
    }

    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        Self::new(DensityFamily::Gaussian, mean, sigma)
    }

    pub fn laplace(location: f64, b: f64) -> Result<Self> {
        Self::new(DensityFamily::Laplace, location, b)
    }

    pub fn family(&self) -> DensityFamily {
        self.family
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        match self.family {
            DensityFamily::Gaussian => {
                -0.5 * z * z - self.scale.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            }
            DensityFamily::Laplace => -z.abs() - (2.0 * self.scale).ln(),
        }
    }
}

fn check_pair(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    for (index, (&pi, &qi)) in p.probs.iter().zip(&q.probs).enumerate() {
        if qi == 0.0 && pi > 0.0 {
            return Err(Error::AbsoluteContinuityViolation { index, p: pi });
        }
    }
    Ok(())
}

/// `Σ p_i^α q_i^{1-α}` over the support of `p`, summed in index order.
fn moment_sum(p: &DiscreteDistribution, q: &DiscreteDistribution, alpha: f64) -> f64 {
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi > 0.0 {
            sum += pi.powf(alpha) * qi.powf(1.0 - alpha);
        }
    }
    sum
}

/// `ln Σ p_i^α q_i^{1-α}`, accurate both near `α = 1` and when the sum
/// itself is not representable.
fn log_moment(p: &DiscreteDistribution, q: &DiscreteDistribution, alpha: f64) -> f64 {
    let support = || {
        p.probs
            .iter()
            .zip(&q.probs)
            .filter(|(pi, _)| **pi > 0.0)
            .map(|(&pi, &qi)| (pi, (pi / qi).ln() * (alpha - 1.0)))
    };
    let largest = support().map(|(_, t)| t).fold(f64::NEG_INFINITY, f64::max);
    if largest < 1.0 {
        // Σ p_i e^{t_i} - 1 = Σ p_i (e^{t_i} - 1) since p sums to one.
        support().map(|(pi, t)| pi * t.exp_m1()).sum::<f64>().ln_1p()
    } else {
        let scaled: f64 = support().map(|(pi, t)| pi * (t - largest).exp()).sum();
        largest + scaled.ln()
    }
}

/// Alpha divergence `(Σ p^α q^{1-α} - 1) / (α(α-1))` for `α > 1`.
pub fn alpha_divergence_discrete(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_pair(p, q)?;
    let sum = moment_sum(p, q, alpha);
    if !sum.is_finite() {
        return Err(Error::Overflow {
            exponent: log_moment(p, q, alpha),
            limit: f64::MAX.ln(),
        });
    }
    Ok((sum - 1.0) / (alpha * (alpha - 1.0)))
}

/// Rényi divergence of order `α > 1`.
pub fn renyi_divergence_discrete(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_pair(p, q)?;
    Ok(log_moment(p, q, alpha) / (alpha - 1.0))
}

pub fn kl_divergence_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_pair(p, q)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).ln())
        .sum())
}

/// Log of the largest likelihood ratio over the support of `p`.
pub fn max_divergence_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    check_pair(p, q)?;
    let ratio = p
        .probs
        .iter()
        .zip(&q.probs)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi / qi)
        .fold(0.0_f64, f64::max);
    Ok(ratio.ln())
}

/// Pushes `p` through the channel: `out_j = Σ_i p_i c[i][j]`.
pub fn apply_channel(p: &DiscreteDistribution, channel: &Channel) -> Result<DiscreteDistribution> {
    if channel.inputs() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: channel.inputs(),
            actual: p.len(),
        });
    }
    let mut out = vec![0.0; channel.outputs()];
    for (pi, row) in p.probs.iter().zip(&channel.rows) {
        for (o, c) in out.iter_mut().zip(row) {
            *o += pi * c;
        }
    }
    DiscreteDistribution::new(out)
}

/// Points around which `p^α q^{1-α}` concentrates, plus the decay length of
/// its tails. Fails when the tilted integrand is not integrable.
fn tilted_support(p: &DensitySpec, q: &DensitySpec, alpha: f64) -> Result<(Vec<f64>, f64)> {
    use DensityFamily::*;
    let mut centres = vec![p.location, q.location];
    let mut width = p.scale.max(q.scale);
    let diverges = || {
        Err(Error::QuadratureDivergence(format!(
            "p^alpha q^(1-alpha) is not integrable for alpha = {alpha}, p = {p:?}, q = {q:?}"
        )))
    };
    match (p.family, q.family) {
        (Gaussian, Gaussian) => {
            let precision =
                alpha / (p.scale * p.scale) + (1.0 - alpha) / (q.scale * q.scale);
            if precision <= 0.0 {
                return diverges();
            }
            let peak = (alpha * p.location / (p.scale * p.scale)
                + (1.0 - alpha) * q.location / (q.scale * q.scale))
                / precision;
            centres.push(peak);
            width = width.max(precision.sqrt().recip());
        }
        (Laplace, Laplace) => {
            let slope = alpha / p.scale - (alpha - 1.0) / q.scale;
            if slope <= 0.0 {
                return diverges();
            }
            width = width.max(slope.recip());
        }
        (Gaussian, Laplace) => {
            let shift = (alpha - 1.0) * p.scale * p.scale / (alpha * q.scale);
            centres.push(p.location - shift);
            centres.push(p.location + shift);
        }
        (Laplace, Gaussian) => return diverges(),
    }
    Ok((centres, width))
}

/// Alpha divergence between two named densities, by adaptive Gauss–Kronrod
/// quadrature of `q · f(p/q)` with the alpha generator
/// `f(u) = (u^α - αu - (1-α)) / (α(α-1))`.
///
/// The integrand is built from log densities so that `q u^α` never
/// overflows on its own, and uses `expm1` near `u = 1` so small divergences
/// are not lost to cancellation.
pub fn alpha_divergence_quadrature(p: &DensitySpec, q: &DensitySpec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (centres, width) = tilted_support(p, q, alpha)?;
    let lo = centres.iter().copied().fold(f64::INFINITY, f64::min) - 40.0 * width;
    let hi = centres.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 40.0 * width;

    const PIECES: usize = 32;
    let mut points: Vec<f64> = (0..=PIECES)
        .map(|i| lo + (hi - lo) * i as f64 / PIECES as f64)
        .chain(centres.iter().copied())
        .collect();
    points.sort_by(f64::total_cmp);
    let min_gap = (hi - lo) * 1e-12;
    points.dedup_by(|b, a| *b - *a <= min_gap);

    let integrand = |x: f64| {
        let lp = p.ln_pdf(x);
        let lq = q.ln_pdf(x);
        let t = lp - lq;
        if (alpha * t).abs() < 1.0 {
            lq.exp() * (f64::exp_m1(alpha * t) - alpha * t.exp_m1())
        } else {
            (lq + alpha * t).exp() - lq.exp() - alpha * (lp.exp() - lq.exp())
        }
    };
    let result = integrate(integrand, &points, &QuadratureOptions::default())?;
    let divergence = result.value / (alpha * (alpha - 1.0));
    if !divergence.is_finite() {
        return Err(Error::QuadratureDivergence("integral overflowed".into()));
    }
    Ok(divergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_distributions_have_zero_divergence() {
        let p = dist(&[0.3, 0.7]);
        assert!(alpha_divergence_discrete(&p, &p, 2.0).unwrap().abs() < 1e-15);
        assert!(renyi_divergence_discrete(&p, &p, 2.0).unwrap().abs() < 1e-15);
        assert_eq!(kl_divergence_discrete(&p, &p).unwrap(), 0.0);
        assert_eq!(max_divergence_discrete(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn two_point_hand_values() {
        let p = dist(&[0.75, 0.25]);
        let q = dist(&[0.25, 0.75]);
        // (0.5625/0.25 + 0.0625/0.75 - 1) / 2 = 2/3
        let a = alpha_divergence_discrete(&p, &q, 2.0).unwrap();
        assert!((a - 2.0 / 3.0).abs() < 1e-15);
        let r = renyi_divergence_discrete(&p, &q, 2.0).unwrap();
        assert!((r - (7.0f64 / 3.0).ln()).abs() < 1e-15);
        let kl = kl_divergence_discrete(&p, &q).unwrap();
        assert!((kl - 0.5 * 3.0f64.ln()).abs() < 1e-15);
        let mx = max_divergence_discrete(&p, &q).unwrap();
        assert!((mx - 3.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn disjoint_support_is_rejected() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.0, 1.0]);
        assert!(matches!(
            alpha_divergence_discrete(&p, &q, 2.0),
            Err(Error::AbsoluteContinuityViolation { index: 0, .. })
        ));
        assert!(kl_divergence_discrete(&p, &q).is_err());
        assert!(max_divergence_discrete(&p, &q).is_err());
    }

    #[test]
    fn zero_mass_in_p_contributes_nothing() {
        let p = dist(&[0.0, 1.0]);
        let q = dist(&[0.5, 0.5]);
        // Σ = 1^α 0.5^{1-α} = 2^{α-1}
        let a = alpha_divergence_discrete(&p, &q, 3.0).unwrap();
        assert!((a - (4.0 - 1.0) / 6.0).abs() < 1e-15);
        assert!((kl_divergence_discrete(&p, &q).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn alpha_at_or_below_one_is_rejected() {
        let p = dist(&[0.5, 0.5]);
        for alpha in [1.0, 1.0 + 1e-13, 0.5, -2.0, f64::NAN] {
            assert!(matches!(
                alpha_divergence_discrete(&p, &p, alpha),
                Err(Error::Domain { field: "alpha", .. })
            ));
        }
    }

    #[test]
    fn extreme_orders_stay_finite_in_log_domain() {
        let p = dist(&[0.99, 0.01]);
        let q = dist(&[0.01, 0.99]);
        assert!(matches!(
            alpha_divergence_discrete(&p, &q, 200.0),
            Err(Error::Overflow { .. })
        ));
        let r = renyi_divergence_discrete(&p, &q, 200.0).unwrap();
        let max = max_divergence_discrete(&p, &q).unwrap();
        assert!(r <= max && max - r < 0.01);
    }

    #[test]
    fn malformed_inputs() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(Channel::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(Channel::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(DensitySpec::gaussian(0.0, 0.0).is_err());
        assert!(DensitySpec::laplace(0.0, -1.0).is_err());
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.2, 0.3, 0.5]);
        assert!(matches!(
            alpha_divergence_discrete(&p, &q, 2.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn channel_examples() {
        let p = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(apply_channel(&p, &Channel::identity(3).unwrap()).unwrap(), p);
        let merge = Channel::new(vec![vec![1.0]; 3]).unwrap();
        assert_eq!(apply_channel(&p, &merge).unwrap().probs(), &[1.0]);
        let u = dist(&[0.5, 0.5]);
        let flip = Channel::new(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let out = apply_channel(&u, &flip).unwrap();
        assert!((out.probs()[0] - 0.5).abs() < 1e-15 && (out.probs()[1] - 0.5).abs() < 1e-15);
        assert!(matches!(
            apply_channel(&u, &merge),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn quadrature_identical_densities() {
        let g = DensitySpec::gaussian(0.0, 1.0).unwrap();
        assert!(alpha_divergence_quadrature(&g, &g, 3.0).unwrap().abs() < 1e-10);
        let l = DensitySpec::laplace(2.0, 0.5).unwrap();
        assert!(alpha_divergence_quadrature(&l, &l, 3.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn quadrature_gaussian_unit_shift() {
        let p = DensitySpec::gaussian(1.0, 1.0).unwrap();
        let q = DensitySpec::gaussian(0.0, 1.0).unwrap();
        let expected = (1f64.exp() - 1.0) / 2.0;
        let got = alpha_divergence_quadrature(&p, &q, 2.0).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-8, "{got} vs {expected}");
    }

    #[test]
    fn quadrature_laplace_unit_shift() {
        let p = DensitySpec::laplace(1.0, 1.0).unwrap();
        let q = DensitySpec::laplace(0.0, 1.0).unwrap();
        let e = 1f64.exp();
        let expected = e / 3.0 + (-2f64).exp() / 6.0 - 0.5;
        let got = alpha_divergence_quadrature(&p, &q, 2.0).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-8, "{got} vs {expected}");
    }

    #[test]
    fn quadrature_rejects_non_integrable_pairs() {
        // Wider p than q: the tilted Gaussian has negative precision at large alpha.
        let p = DensitySpec::gaussian(0.0, 2.0).unwrap();
        let q = DensitySpec::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(
            alpha_divergence_quadrature(&p, &q, 4.0),
            Err(Error::QuadratureDivergence(_))
        ));
        let l = DensitySpec::laplace(0.0, 1.0).unwrap();
        assert!(matches!(
            alpha_divergence_quadrature(&l, &q, 2.0),
            Err(Error::QuadratureDivergence(_))
        ));
    }

    #[test]
    fn quadrature_overflow_is_reported() {
        let p = DensitySpec::gaussian(2.0, 0.5).unwrap();
        let q = DensitySpec::gaussian(0.0, 0.5).unwrap();
        assert!(matches!(
            alpha_divergence_quadrature(&p, &q, 64.0),
            Err(Error::QuadratureDivergence(_))
        ));
    }

    #[test]
    fn quadrature_unequal_gaussians_matches_closed_form() {
        // Equal means, sigma_p = 1, sigma_q = 2, alpha = 2:
        // ∫ p^2 / q = (σq/σp^2) / sqrt(2π) · sqrt(2π) / sqrt(2/σp^2 - 1/σq^2)
        let (sp, sq, alpha) = (1.0f64, 2.0f64, 2.0f64);
        let precision = alpha / (sp * sp) + (1.0 - alpha) / (sq * sq);
        let moment = sq.powf(alpha - 1.0) / sp.powf(alpha) / precision.sqrt();
        let expected = (moment - 1.0) / (alpha * (alpha - 1.0));
        let p = DensitySpec::gaussian(0.0, sp).unwrap();
        let q = DensitySpec::gaussian(0.0, sq).unwrap();
        let got = alpha_divergence_quadrature(&p, &q, alpha).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-9, "{got} vs {expected}");
    }
}
