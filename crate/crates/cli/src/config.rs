use std::path::{Path, PathBuf};

use adp_core::{AlphaSearchConfig, AlphaSelection, ConversionForm, Framework, OptimizerCurve};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::presets::Preset;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MechanismKind {
    #[value(name = "randomized-response", alias = "rr")]
    RandomizedResponse,
    Laplace,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Mechanism,
    Cumulative,
    EpsilonVsAlpha,
    SigmaVsAlpha,
}

impl SweepKind {
    pub fn curve(self) -> Option<OptimizerCurve> {
        match self {
            SweepKind::EpsilonVsAlpha => Some(OptimizerCurve::EpsilonVsAlpha),
            SweepKind::SigmaVsAlpha => Some(OptimizerCurve::SigmaVsAlpha),
            _ => None,
        }
    }
}

/// A composition step: a bare ε, or `alpha:eps` pinning the order it was
/// measured at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Step {
    Plain(f64),
    Tagged { alpha: f64, epsilon: f64 },
}

impl std::str::FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        match s.split_once(':') {
            Some((alpha, eps)) => Ok(Step::Tagged {
                alpha: number(alpha)?,
                epsilon: number(eps)?,
            }),
            None => Ok(Step::Plain(number(s)?)),
        }
    }
}

/// Every parameter a command can take. Loaded from `--config`, then
/// overridden field by field from the command line; the merged value is
/// echoed with each result.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conversion: Option<ConversionForm>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub mechanism: Option<MechanismKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub framework: Option<Framework>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<Step>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_per_query: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_bound: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<SweepKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_selection: Option<AlphaSelection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid {
            field: "config",
            message: format!("{}: {e}", path.display()),
        })
    }

    /// Fields set in `other` replace the ones here.
    pub fn merge(&mut self, other: RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            output, format, delta, sensitivity, alpha_min, alpha_max, alpha_step, sigma_min,
            sigma_max, sigma_step, conversion, mechanism, p, scale_b, sigma, alpha, framework,
            steps, ledger, delta_per_query, delta_slack, epsilon, rho, iterations, epsilon_bound,
            preset, kind, max_iterations, targets, alpha_selection
        );
    }

    pub fn search(&self) -> AlphaSearchConfig {
        let d = AlphaSearchConfig::default();
        AlphaSearchConfig {
            alpha_min: self.alpha_min.unwrap_or(d.alpha_min),
            alpha_max: self.alpha_max.unwrap_or(d.alpha_max),
            alpha_step: self.alpha_step.unwrap_or(d.alpha_step),
            sigma_min: self.sigma_min.unwrap_or(d.sigma_min),
            sigma_max: self.sigma_max.unwrap_or(d.sigma_max),
            sigma_step: self.sigma_step.unwrap_or(d.sigma_step),
            conversion: self.conversion.unwrap_or_default(),
        }
    }

    pub fn delta_or_default(&self) -> f64 {
        self.delta.unwrap_or(1e-5)
    }

    pub fn sensitivity_or_default(&self) -> f64 {
        self.sensitivity.unwrap_or(1.0)
    }
}

pub fn require<T: Copy>(value: Option<T>, field: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::Invalid {
        field,
        message: "required but not given".into(),
    })
}
