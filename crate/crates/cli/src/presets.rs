//! Parameter sets that regenerate each comparison figure in one command.

use adp_core::sweep::{
    sweep_cumulative_vs_iterations, sweep_mechanism_vs_alpha, sweep_optimizer_curves,
};
use adp_core::{AlphaSelection, MechanismSpec, OptimizerCurve, SweepTable};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Randomized response, ε against α for p = 0.55, 0.75, 0.9.
    Fig1,
    /// Laplace, ε against α for b = 1, 2, 4.
    Fig2,
    /// Gaussian, ε against α for σ = 1, 2, 5.
    Fig3,
    /// Cumulative ε, σ = 100, δ = 1e-5, 1e-10, 1e-15, up to 100 iterations.
    Fig4,
    /// As fig4, up to 1000 iterations.
    Fig5,
    /// Cumulative ε, δ = 1e-25, σ = 10, 50, 100, up to 1000 iterations.
    Fig6,
    /// Cumulative ε of 1000 queries against α for σ = 50, 100, 150.
    Fig7,
    /// Smallest σ for 1000 queries against α for ε bounds 0.5, 1, 2.
    Fig8,
}

const FIG_DELTAS: [f64; 3] = [1e-5, 1e-10, 1e-15];

/// Keeps only `wanted` when given, otherwise the preset's own values.
fn pick(defaults: &[f64], wanted: Option<f64>) -> Vec<f64> {
    match wanted {
        Some(v) => vec![v],
        None => defaults.to_vec(),
    }
}

fn label(name: &str, value: f64) -> String {
    if value.abs() < 1e-3 {
        format!("{name}{value:e}")
    } else {
        format!("{name}{value}")
    }
}

/// Named tables for a preset. `--delta`, `--sigma`, `--p` and `--scale-b`
/// narrow a preset to a single curve.
pub fn tables(preset: Preset, cfg: &RunConfig) -> Result<Vec<(String, SweepTable)>, CliError> {
    let search = cfg.search();
    let sensitivity = cfg.sensitivity_or_default();
    let selection = cfg.alpha_selection.unwrap_or(AlphaSelection::PerCurve);
    let mut out = Vec::new();
    match preset {
        Preset::Fig1 | Preset::Fig2 | Preset::Fig3 => {
            let delta = cfg.delta_or_default();
            let (name, values, wanted) = match preset {
                Preset::Fig1 => ("p", [0.55, 0.75, 0.9], cfg.p),
                Preset::Fig2 => ("b", [1.0, 2.0, 4.0], cfg.scale_b),
                _ => ("sigma", [1.0, 2.0, 5.0], cfg.sigma),
            };
            for v in pick(&values, wanted) {
                let mech = match preset {
                    Preset::Fig1 => MechanismSpec::RandomizedResponse { p: v },
                    Preset::Fig2 => MechanismSpec::Laplace {
                        scale_b: v,
                        l1_sensitivity: sensitivity,
                    },
                    _ => MechanismSpec::Gaussian {
                        sigma: v,
                        l2_sensitivity: sensitivity,
                    },
                };
                let t = sweep_mechanism_vs_alpha(&mech, &search.alpha_grid(), delta, search.conversion)?;
                out.push((label(name, v), t));
            }
        }
        Preset::Fig4 | Preset::Fig5 => {
            let sigma = cfg.sigma.unwrap_or(100.0);
            let max = cfg
                .max_iterations
                .unwrap_or(if preset == Preset::Fig4 { 100 } else { 1000 });
            for delta in pick(&FIG_DELTAS, cfg.delta) {
                let t = sweep_cumulative_vs_iterations(sigma, sensitivity, delta, max, &search, selection)?;
                out.push((label("delta", delta), t));
            }
        }
        Preset::Fig6 => {
            let delta = cfg.delta.unwrap_or(1e-25);
            let max = cfg.max_iterations.unwrap_or(1000);
            for sigma in pick(&[10.0, 50.0, 100.0], cfg.sigma) {
                let t = sweep_cumulative_vs_iterations(sigma, sensitivity, delta, max, &search, selection)?;
                out.push((label("sigma", sigma), t));
            }
        }
        Preset::Fig7 | Preset::Fig8 => {
            let delta = cfg.delta_or_default();
            let iterations = cfg.iterations.unwrap_or(1000);
            let (mode, targets) = if preset == Preset::Fig7 {
                let t = cfg.targets.clone().unwrap_or_else(|| pick(&[50.0, 100.0, 150.0], cfg.sigma));
                (OptimizerCurve::EpsilonVsAlpha, t)
            } else {
                let t = cfg.targets.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
                (OptimizerCurve::SigmaVsAlpha, t)
            };
            let t = sweep_optimizer_curves(iterations, delta, sensitivity, &targets, mode, &search)?;
            out.push((String::new(), t));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_file_friendly() {
        assert_eq!(label("delta", 1e-5), "delta1e-5");
        assert_eq!(label("p", 0.55), "p0.55");
        assert_eq!(label("sigma", 100.0), "sigma100");
    }

    #[test]
    fn filters_narrow_to_one_curve() {
        let cfg = RunConfig {
            delta: Some(1e-10),
            alpha_max: Some(40.0),
            max_iterations: Some(5),
            ..Default::default()
        };
        let t = tables(Preset::Fig4, &cfg).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0, "delta1e-10");
        assert_eq!(t[0].1.rows.len(), 5);
    }
}
