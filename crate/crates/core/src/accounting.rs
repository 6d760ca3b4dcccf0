//! Guarantee types, composition rules, conversion to (ε, δ)-DP and group
//! privacy for the ADP, RDP, zCDP and advanced-composition frameworks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, check_delta, check_exponent, check_nonneg, Error, Result};

/// `(α, ε)`-ADP: the alpha divergence between neighbouring output
/// distributions is at most `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdpGuarantee {
    pub alpha: f64,
    pub epsilon: f64,
}

impl AdpGuarantee {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_nonneg("epsilon", epsilon)?;
        Ok(Self { alpha, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdpGuarantee {
    pub alpha: f64,
    pub epsilon_bar: f64,
}

impl RdpGuarantee {
    pub fn new(alpha: f64, epsilon_bar: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_nonneg("epsilon_bar", epsilon_bar)?;
        Ok(Self { alpha, epsilon_bar })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZcdpGuarantee {
    pub rho: f64,
}

impl ZcdpGuarantee {
    pub fn new(rho: f64) -> Result<Self> {
        check_nonneg("rho", rho)?;
        Ok(Self { rho })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxDpGuarantee {
    pub epsilon: f64,
    pub delta: f64,
}

impl ApproxDpGuarantee {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        check_nonneg("epsilon", epsilon)?;
        check_delta(delta)?;
        Ok(Self { epsilon, delta })
    }
}

/// Which form of the ADP → (ε, δ) bound to use.
///
/// `Proof` is `ln((α(α-1)ε + 1)/δ)/(α-1)`, the bound the Markov argument
/// actually yields. `Statement` replaces `ε` with `e^ε` inside the
/// logarithm; it is kept for side-by-side comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConversionForm {
    #[default]
    Proof,
    Statement,
}

impl fmt::Display for ConversionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConversionForm::Proof => "proof",
            ConversionForm::Statement => "statement",
        })
    }
}

impl FromStr for ConversionForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proof" => Ok(ConversionForm::Proof),
            "statement" => Ok(ConversionForm::Statement),
            other => Err(Error::domain(
                "conversion",
                format!("expected `proof` or `statement`, got `{other}`"),
            )),
        }
    }
}

/// Adaptive sequential composition: `e1 + e2 + α(α-1)·e1·e2`.
pub fn compose_adp(e1: f64, e2: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_nonneg("epsilon", e1)?;
    check_nonneg("epsilon", e2)?;
    Ok(e1 + e2 + alpha * (alpha - 1.0) * (e1 * e2))
}

/// `ln(α(α-1)·E_n + 1)` for the `n`-fold ADP composition `E_n` of `eps`,
/// i.e. `n·ln(1 + α(α-1)ε)`. Finite even when `E_n` itself is not.
pub fn adp_log_moment_n(eps: f64, n: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_nonneg("epsilon", eps)?;
    if n == 0 {
        return Err(Error::domain("n", "must be >= 1"));
    }
    Ok(n as f64 * (alpha * (alpha - 1.0) * eps).ln_1p())
}

/// Closed form of `n` applications of [`compose_adp`] to the same `eps`:
/// `((α(α-1)ε + 1)^n - 1)/(α(α-1))`, evaluated as `expm1(n·ln1p(α(α-1)ε))`.
pub fn compose_adp_n(eps: f64, n: u64, alpha: f64) -> Result<f64> {
    let log_moment = adp_log_moment_n(eps, n, alpha)?;
    if n == 1 {
        return Ok(eps);
    }
    check_exponent(log_moment)?;
    Ok(log_moment.exp_m1() / (alpha * (alpha - 1.0)))
}

pub fn compose_rdp(e1: f64, e2: f64) -> Result<f64> {
    check_nonneg("epsilon_bar", e1)?;
    check_nonneg("epsilon_bar", e2)?;
    Ok(e1 + e2)
}

pub fn compose_zcdp(r1: f64, r2: f64) -> Result<f64> {
    check_nonneg("rho", r1)?;
    check_nonneg("rho", r2)?;
    Ok(r1 + r2)
}

/// Advanced composition of `n` queries, each `(eps, delta_per_query)`-DP:
/// `ε = eps·sqrt(2n·ln(1/δ')) + n·eps·(e^eps - 1)`, `δ = n·δ_q + δ'`.
pub fn compose_advanced(
    eps_per_query: f64,
    delta_per_query: f64,
    n: u64,
    delta_slack: f64,
) -> Result<ApproxDpGuarantee> {
    check_nonneg("epsilon", eps_per_query)?;
    check_delta(delta_per_query).map_err(|_| {
        Error::domain("delta_per_query", format!("must lie in (0, 1), got {delta_per_query}"))
    })?;
    check_delta(delta_slack)
        .map_err(|_| Error::domain("delta_slack", format!("must lie in (0, 1), got {delta_slack}")))?;
    if n == 0 {
        return Err(Error::domain("n", "must be >= 1"));
    }
    let nf = n as f64;
    let delta = nf * delta_per_query + delta_slack;
    if delta >= 1.0 {
        return Err(Error::domain("delta", format!("total delta {delta} is not below 1")));
    }
    let epsilon = eps_per_query * (2.0 * nf * (1.0 / delta_slack).ln()).sqrt()
        + nf * eps_per_query * eps_per_query.exp_m1();
    Ok(ApproxDpGuarantee { epsilon, delta })
}

/// How an overall δ target is split for advanced composition:
/// half to the slack term, the other half spread evenly over the queries.
pub fn advanced_delta_split(delta: f64, n: u64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::domain("n", "must be >= 1"));
    }
    Ok((delta / (2.0 * n as f64), delta / 2.0))
}

fn adp_convert_from_log_moment(
    log_moment: f64,
    epsilon: f64,
    alpha: f64,
    delta: f64,
    form: ConversionForm,
) -> Result<f64> {
    let ln_inv_delta = -delta.ln();
    match form {
        ConversionForm::Proof => Ok((log_moment + ln_inv_delta) / (alpha - 1.0)),
        ConversionForm::Statement => {
            // ln(e^ε·A + 1) = ε + ln(A + e^{-ε})
            let a = alpha * (alpha - 1.0);
            Ok((epsilon + (a + (-epsilon).exp()).ln() + ln_inv_delta) / (alpha - 1.0))
        }
    }
}

/// ADP → (ε̄, δ)-DP via Markov's inequality on the likelihood ratio.
pub fn adp_to_approx(g: AdpGuarantee, delta: f64, form: ConversionForm) -> Result<ApproxDpGuarantee> {
    check_alpha(g.alpha)?;
    check_nonneg("epsilon", g.epsilon)?;
    check_delta(delta)?;
    let log_moment = (g.alpha * (g.alpha - 1.0) * g.epsilon).ln_1p();
    let epsilon = adp_convert_from_log_moment(log_moment, g.epsilon, g.alpha, delta, form)?;
    Ok(ApproxDpGuarantee { epsilon, delta })
}

/// Converted (ε, δ) cost of `n` identical `(α, eps)`-ADP queries.
///
/// Equivalent to `adp_to_approx(compose_adp_n(eps, n, α))`, but the proof
/// form works from `n·ln1p(α(α-1)ε)` directly and stays finite when the
/// cumulative ADP ε itself would overflow.
pub fn adp_composed_to_approx(
    eps: f64,
    n: u64,
    alpha: f64,
    delta: f64,
    form: ConversionForm,
) -> Result<ApproxDpGuarantee> {
    check_delta(delta)?;
    let log_moment = adp_log_moment_n(eps, n, alpha)?;
    let epsilon = match form {
        ConversionForm::Proof => {
            adp_convert_from_log_moment(log_moment, eps, alpha, delta, form)?
        }
        ConversionForm::Statement => {
            let cumulative = compose_adp_n(eps, n, alpha)?;
            adp_convert_from_log_moment(log_moment, cumulative, alpha, delta, form)?
        }
    };
    Ok(ApproxDpGuarantee { epsilon, delta })
}

/// RDP → (ε, δ): `ε̄ + ln(1/δ)/(α-1)`.
pub fn rdp_to_approx(g: RdpGuarantee, delta: f64) -> Result<ApproxDpGuarantee> {
    check_alpha(g.alpha)?;
    check_nonneg("epsilon_bar", g.epsilon_bar)?;
    check_delta(delta)?;
    Ok(ApproxDpGuarantee {
        epsilon: g.epsilon_bar + (1.0 / delta).ln() / (g.alpha - 1.0),
        delta,
    })
}

/// zCDP → (ε, δ): `ρ + 2·sqrt(ρ·ln(1/δ))`.
pub fn zcdp_to_approx(g: ZcdpGuarantee, delta: f64) -> Result<ApproxDpGuarantee> {
    check_nonneg("rho", g.rho)?;
    check_delta(delta)?;
    Ok(ApproxDpGuarantee {
        epsilon: g.rho + 2.0 * (g.rho * (1.0 / delta).ln()).sqrt(),
        delta,
    })
}

/// Group privacy for datasets differing in at most `2^k` entries:
/// order drops to `α' = α/2^k` and ε scales by `α(α-1)/(α'(α'-1))`.
pub fn group_privacy_adp(g: AdpGuarantee, k: u32) -> Result<AdpGuarantee> {
    check_alpha(g.alpha)?;
    check_nonneg("epsilon", g.epsilon)?;
    if k == 0 {
        return Ok(g);
    }
    let group = 2f64.powi(k as i32);
    let alpha = g.alpha / group;
    if !(g.alpha > group) || alpha <= 1.0 + 1e-12 {
        return Err(Error::GroupTooLarge {
            alpha: g.alpha,
            k,
            bound: group,
        });
    }
    let factor = g.alpha * (g.alpha - 1.0) / (alpha * (alpha - 1.0));
    Ok(AdpGuarantee {
        alpha,
        epsilon: factor * g.epsilon,
    })
}

/// Group privacy for an arbitrary number of differing entries, rounded up
/// to the next power of two.
pub fn group_privacy_adp_for_size(g: AdpGuarantee, differing_entries: u64) -> Result<AdpGuarantee> {
    if differing_entries == 0 {
        return Err(Error::domain("group_size", "must be >= 1"));
    }
    let k = differing_entries.next_power_of_two().trailing_zeros();
    group_privacy_adp(g, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    Adp,
    Rdp,
    Zcdp,
    Advanced,
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Framework::Adp => "adp",
            Framework::Rdp => "rdp",
            Framework::Zcdp => "zcdp",
            Framework::Advanced => "advanced",
        })
    }
}

impl FromStr for Framework {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adp" => Ok(Framework::Adp),
            "rdp" => Ok(Framework::Rdp),
            "zcdp" => Ok(Framework::Zcdp),
            "advanced" => Ok(Framework::Advanced),
            other => Err(Error::domain(
                "framework",
                format!("expected adp, rdp, zcdp or advanced, got `{other}`"),
            )),
        }
    }
}

/// Ordered record of per-step costs under one framework, with the running
/// framework-native total.
///
/// ADP and RDP ledgers are pinned to a single α. Advanced ledgers compose
/// identical per-query ε values and carry the per-query and slack δ.
/// `cumulative` is always the sequential left fold of the composition rule
/// over `steps`, so a deserialized ledger is replayed and rejected if the
/// stored total disagrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LedgerRecord", into = "LedgerRecord")]
pub struct CompositionLedger {
    framework: Framework,
    alpha: Option<f64>,
    delta_per_query: Option<f64>,
    delta_slack: Option<f64>,
    steps: Vec<f64>,
    cumulative: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerRecord {
    framework: Framework,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_per_query: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_slack: Option<f64>,
    steps: Vec<f64>,
    cumulative: f64,
}

impl CompositionLedger {
    pub fn adp(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::empty(Framework::Adp, Some(alpha), None, None))
    }

    pub fn rdp(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::empty(Framework::Rdp, Some(alpha), None, None))
    }

    pub fn zcdp() -> Self {
        Self::empty(Framework::Zcdp, None, None, None)
    }

    pub fn advanced(delta_per_query: f64, delta_slack: f64) -> Result<Self> {
        check_delta(delta_per_query)?;
        check_delta(delta_slack)?;
        Ok(Self::empty(
            Framework::Advanced,
            None,
            Some(delta_per_query),
            Some(delta_slack),
        ))
    }

    fn empty(
        framework: Framework,
        alpha: Option<f64>,
        delta_per_query: Option<f64>,
        delta_slack: Option<f64>,
    ) -> Self {
        Self {
            framework,
            alpha,
            delta_per_query,
            delta_slack,
            steps: Vec::new(),
            cumulative: 0.0,
        }
    }

    pub fn framework(&self) -> Framework {
        self.framework
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    pub fn delta_per_query(&self) -> Option<f64> {
        self.delta_per_query
    }

    pub fn delta_slack(&self) -> Option<f64> {
        self.delta_slack
    }

    /// Appends a step, returning the new ledger state.
    pub fn append(mut self, step: f64) -> Result<Self> {
        self.cumulative = self.fold_step(self.cumulative, step, self.steps.len())?;
        self.steps.push(step);
        Ok(self)
    }

    /// Appends an ADP step carrying its own α, rejecting a mismatch.
    pub fn append_adp(self, g: AdpGuarantee) -> Result<Self> {
        match self.alpha {
            Some(alpha) if self.framework == Framework::Adp && alpha == g.alpha => {
                self.append(g.epsilon)
            }
            Some(alpha) if self.framework == Framework::Adp => Err(Error::MixedAlpha {
                expected: alpha,
                got: g.alpha,
            }),
            _ => Err(Error::domain("framework", "not an ADP ledger")),
        }
    }

    pub fn append_rdp(self, g: RdpGuarantee) -> Result<Self> {
        match self.alpha {
            Some(alpha) if self.framework == Framework::Rdp && alpha == g.alpha => {
                self.append(g.epsilon_bar)
            }
            Some(alpha) if self.framework == Framework::Rdp => Err(Error::MixedAlpha {
                expected: alpha,
                got: g.alpha,
            }),
            _ => Err(Error::domain("framework", "not an RDP ledger")),
        }
    }

    fn fold_step(&self, acc: f64, step: f64, index: usize) -> Result<f64> {
        match self.framework {
            Framework::Adp => compose_adp(acc, step, self.alpha.expect("ADP ledger has alpha")),
            Framework::Rdp => compose_rdp(acc, step),
            Framework::Zcdp => compose_zcdp(acc, step),
            Framework::Advanced => {
                check_nonneg("epsilon", step)?;
                if let Some(&first) = self.steps.first() {
                    if first != step {
                        return Err(Error::domain(
                            "steps",
                            "advanced composition needs identical per-query epsilons",
                        ));
                    }
                }
                Ok(compose_advanced(
                    step,
                    self.delta_per_query.expect("advanced ledger has delta"),
                    index as u64 + 1,
                    self.delta_slack.expect("advanced ledger has delta"),
                )?
                .epsilon)
            }
        }
    }

    /// Recomputes the cumulative total from the steps alone.
    pub fn replay(&self) -> Result<f64> {
        let mut fresh = Self::empty(self.framework, self.alpha, self.delta_per_query, self.delta_slack);
        for &step in &self.steps {
            fresh = fresh.append(step)?;
        }
        Ok(fresh.cumulative)
    }

    /// Total δ of an advanced ledger after its current number of steps.
    pub fn advanced_delta(&self) -> Option<f64> {
        match (self.delta_per_query, self.delta_slack) {
            (Some(dq), Some(ds)) => Some(self.steps.len() as f64 * dq + ds),
            _ => None,
        }
    }
}

impl TryFrom<LedgerRecord> for CompositionLedger {
    type Error = Error;

    fn try_from(r: LedgerRecord) -> Result<Self> {
        let mut ledger = match r.framework {
            Framework::Adp => Self::adp(
                r.alpha
                    .ok_or_else(|| Error::domain("alpha", "ADP ledger needs alpha"))?,
            )?,
            Framework::Rdp => Self::rdp(
                r.alpha
                    .ok_or_else(|| Error::domain("alpha", "RDP ledger needs alpha"))?,
            )?,
            Framework::Zcdp => Self::zcdp(),
            Framework::Advanced => Self::advanced(
                r.delta_per_query
                    .ok_or_else(|| Error::domain("delta_per_query", "advanced ledger needs it"))?,
                r.delta_slack
                    .ok_or_else(|| Error::domain("delta_slack", "advanced ledger needs it"))?,
            )?,
        };
        for step in r.steps {
            ledger = ledger.append(step)?;
        }
        if ledger.cumulative.to_bits() != r.cumulative.to_bits() {
            return Err(Error::LedgerMismatch {
                stored: r.cumulative,
                replayed: ledger.cumulative,
            });
        }
        Ok(ledger)
    }
}

impl From<CompositionLedger> for LedgerRecord {
    fn from(l: CompositionLedger) -> Self {
        Self {
            framework: l.framework,
            alpha: l.alpha,
            delta_per_query: l.delta_per_query,
            delta_slack: l.delta_slack,
            steps: l.steps,
            cumulative: l.cumulative,
        }
    }
}
