//! Tabular sweeps behind the comparison curves: single-query cost against α
//! per mechanism, cumulative cost against iteration count for the four
//! frameworks, and the optimizer's per-α curves.
//!
//! Every cell is produced by the mechanisms, accounting and optimizer
//! modules; this module only orchestrates and records parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::accounting::{
    adp_to_approx, advanced_delta_split, compose_advanced, zcdp_to_approx, AdpGuarantee,
    ConversionForm, ZcdpGuarantee,
};
use crate::error::{check_delta, check_nonneg, check_positive, Error, ErrorKind, Result};
use crate::mechanisms::{gaussian_approx_epsilon, gaussian_zcdp_rho, MechanismSpec};
use crate::optimizer::{
    adp_gaussian_objective, find_alpha_min_epsilon, find_rdp_alpha_min_epsilon,
    min_sigma_at_alpha, rdp_gaussian_objective, AlphaSearchConfig,
};

/// Iteration counts above this are sampled on a log scale instead of densely.
pub const DENSE_ITERATION_LIMIT: u64 = 1000;
pub const LOG_SAMPLE_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    /// One record per value of the sweep variable (first column), ascending.
    /// `None` marks a cell whose value is infeasible or not representable.
    pub rows: Vec<Vec<Option<f64>>>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepTable {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// Checks that every row is full width and the sweep variable ascends.
    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            if row.len() != self.columns.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.columns.len(),
                    actual: row.len(),
                });
            }
        }
        let keys: Vec<f64> = self.rows.iter().map(|r| r[0].unwrap_or(f64::NAN)).collect();
        if keys.iter().any(|k| k.is_nan()) || keys.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("rows", "sweep variable must be present and strictly increasing"));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// CSV rendering: header line, then one line per row, LF endings,
    /// 17 significant digits per value, empty field for a missing cell.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    write!(out, "{}", format_float(*v)).expect("writing to a String");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 17 significant digits; parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn numeric_cell(value: Result<f64>) -> Result<Option<f64>> {
    match value {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(e) if e.kind() == ErrorKind::Numeric => Ok(None),
        Err(e) => Err(e),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

/// Converted single-query ADP cost and the mechanism's baseline, across α.
///
/// Grid points where the mechanism cost or its conversion fails are left out
/// and listed under `skipped_alpha` in the metadata.
pub fn sweep_mechanism_vs_alpha(
    mech: &MechanismSpec,
    alpha_grid: &[f64],
    delta: f64,
    form: ConversionForm,
) -> Result<SweepTable> {
    mech.validate()?;
    check_delta(delta)?;
    if alpha_grid.is_empty() {
        return Err(Error::domain("alpha_grid", "must not be empty"));
    }
    if alpha_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("alpha_grid", "must be strictly increasing"));
    }
    let baseline = mech.baseline_epsilon(delta)?;
    let mut table = SweepTable::new(&["alpha", "adp_converted_epsilon", "baseline_epsilon"]);
    let mut skipped = Vec::new();
    for &alpha in alpha_grid {
        let converted = mech
            .adp_epsilon(alpha)
            .and_then(|eps| adp_to_approx(AdpGuarantee::new(alpha, eps)?, delta, form));
        match converted {
            Ok(c) => table.rows.push(vec![Some(alpha), Some(c.epsilon), Some(baseline)]),
            Err(e) if e.kind() == ErrorKind::Numeric => skipped.push(alpha),
            Err(e) => return Err(e),
        }
    }
    table.meta("mechanism", serde_label(mech));
    table.meta("delta", delta);
    table.meta("conversion", form);
    table.meta("alpha_grid", format!("{}..{} ({} points)", alpha_grid[0], alpha_grid[alpha_grid.len() - 1], alpha_grid.len()));
    table.meta("skipped_alpha", join(&skipped));
    match *mech {
        MechanismSpec::RandomizedResponse { p } => table.meta("p", p),
        MechanismSpec::Laplace {
            scale_b,
            l1_sensitivity,
        } => {
            table.meta("scale_b", scale_b);
            table.meta("l1_sensitivity", l1_sensitivity);
        }
        MechanismSpec::Gaussian {
            sigma,
            l2_sensitivity,
        } => {
            table.meta("sigma", sigma);
            table.meta("l2_sensitivity", l2_sensitivity);
        }
    }
    Ok(table)
}

fn serde_label(mech: &MechanismSpec) -> &'static str {
    match mech {
        MechanismSpec::RandomizedResponse { .. } => "randomized_response",
        MechanismSpec::Laplace { .. } => "laplace",
        MechanismSpec::Gaussian { .. } => "gaussian",
    }
}

/// Iteration counts evaluated by [`sweep_cumulative_vs_iterations`]: every
/// integer up to [`DENSE_ITERATION_LIMIT`], otherwise [`LOG_SAMPLE_POINTS`]
/// log-spaced integers from 1 to `max_iterations`.
pub fn iteration_points(max_iterations: u64) -> Vec<u64> {
    if max_iterations <= DENSE_ITERATION_LIMIT {
        return (1..=max_iterations).collect();
    }
    let last = (LOG_SAMPLE_POINTS - 1) as f64;
    let ln_max = (max_iterations as f64).ln();
    let mut points: Vec<u64> = Vec::with_capacity(LOG_SAMPLE_POINTS);
    for i in 0..LOG_SAMPLE_POINTS {
        let v = (ln_max * i as f64 / last).exp().round() as u64;
        let v = match points.last() {
            Some(&prev) if v <= prev => prev + 1,
            _ => v,
        };
        points.push(v.min(max_iterations));
    }
    *points.last_mut().expect("non-empty") = max_iterations;
    points.dedup();
    points
}

/// How the ADP and RDP orders are chosen along an iteration sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSelection {
    /// One α per curve, optimised for the largest iteration count.
    #[default]
    PerCurve,
    /// Re-optimise α at every iteration count.
    PerIteration,
}

/// Converted cumulative cost of a Gaussian mechanism against the number of
/// iterations under ADP, RDP, zCDP and advanced composition.
pub fn sweep_cumulative_vs_iterations(
    sigma: f64,
    l2_sensitivity: f64,
    delta: f64,
    max_iterations: u64,
    cfg: &AlphaSearchConfig,
    selection: AlphaSelection,
) -> Result<SweepTable> {
    check_positive("sigma", sigma)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    check_delta(delta)?;
    cfg.validate()?;
    if max_iterations == 0 {
        return Err(Error::domain("max_iterations", "must be >= 1"));
    }
    let points = iteration_points(max_iterations);
    let adp_curve_alpha =
        find_alpha_min_epsilon(max_iterations, sigma, delta, l2_sensitivity, cfg)?.alpha_star;
    let rdp_curve_alpha =
        find_rdp_alpha_min_epsilon(max_iterations, sigma, delta, l2_sensitivity, cfg)?.alpha_star;
    let rho = gaussian_zcdp_rho(sigma, l2_sensitivity)?;

    let mut table = SweepTable::new(&[
        "iterations",
        "adp_epsilon",
        "rdp_epsilon",
        "zcdp_epsilon",
        "advanced_epsilon",
    ]);
    for &n in &points {
        let (adp_alpha, rdp_alpha) = match selection {
            AlphaSelection::PerCurve => (adp_curve_alpha, rdp_curve_alpha),
            AlphaSelection::PerIteration => (
                find_alpha_min_epsilon(n, sigma, delta, l2_sensitivity, cfg)?.alpha_star,
                find_rdp_alpha_min_epsilon(n, sigma, delta, l2_sensitivity, cfg)?.alpha_star,
            ),
        };
        let adp = numeric_cell(adp_gaussian_objective(
            n,
            sigma,
            delta,
            l2_sensitivity,
            adp_alpha,
            cfg.conversion,
        ))?;
        let rdp = numeric_cell(rdp_gaussian_objective(n, sigma, delta, l2_sensitivity, rdp_alpha))?;
        let zcdp = zcdp_to_approx(ZcdpGuarantee::new(n as f64 * rho)?, delta)?.epsilon;
        let (delta_per_query, delta_slack) = advanced_delta_split(delta, n)?;
        let per_query = gaussian_approx_epsilon(sigma, l2_sensitivity, delta_per_query)?;
        let advanced = compose_advanced(per_query, delta_per_query, n, delta_slack)?.epsilon;
        table
            .rows
            .push(vec![Some(n as f64), adp, rdp, Some(zcdp), Some(advanced)]);
    }
    table.meta("sigma", sigma);
    table.meta("l2_sensitivity", l2_sensitivity);
    table.meta("delta", delta);
    table.meta("max_iterations", max_iterations);
    table.meta("conversion", cfg.conversion);
    table.meta("alpha_grid", format!("{}..{} step {}", cfg.alpha_min, cfg.alpha_max, cfg.alpha_step));
    table.meta(
        "alpha_selection",
        match selection {
            AlphaSelection::PerCurve => "per_curve",
            AlphaSelection::PerIteration => "per_iteration",
        },
    );
    table.meta("adp_alpha", adp_curve_alpha);
    table.meta("rdp_alpha", rdp_curve_alpha);
    table.meta("advanced_delta_split", "slack = delta/2, per query = delta/(2n)");
    table.meta(
        "sampling",
        if max_iterations <= DENSE_ITERATION_LIMIT {
            "dense".to_string()
        } else {
            format!("log ({} points)", points.len())
        },
    );
    if max_iterations > DENSE_ITERATION_LIMIT {
        let listed: Vec<String> = points.iter().map(u64::to_string).collect();
        table.meta("sampled_iterations", listed.join(";"));
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerCurve {
    /// Converted cumulative ε against α, one column per σ.
    EpsilonVsAlpha,
    /// Smallest feasible σ against α, one column per ε bound.
    SigmaVsAlpha,
}

/// Per-α curves of the two searches over `cfg`'s α grid.
pub fn sweep_optimizer_curves(
    iterations: u64,
    delta: f64,
    l2_sensitivity: f64,
    targets: &[f64],
    mode: OptimizerCurve,
    cfg: &AlphaSearchConfig,
) -> Result<SweepTable> {
    check_delta(delta)?;
    check_nonneg("l2_sensitivity", l2_sensitivity)?;
    cfg.validate()?;
    if iterations == 0 {
        return Err(Error::domain("iterations", "must be >= 1"));
    }
    if targets.is_empty() {
        return Err(Error::domain("targets", "must not be empty"));
    }
    for &t in targets {
        check_positive("targets", t)?;
    }
    let prefix = match mode {
        OptimizerCurve::EpsilonVsAlpha => "sigma_",
        OptimizerCurve::SigmaVsAlpha => "epsilon_bound_",
    };
    let mut columns = vec!["alpha".to_string()];
    columns.extend(targets.iter().map(|t| format!("{prefix}{t}")));
    let mut table = SweepTable {
        columns,
        rows: Vec::new(),
        metadata: BTreeMap::new(),
    };
    for alpha in cfg.alpha_grid() {
        let mut row = vec![Some(alpha)];
        for &target in targets {
            row.push(match mode {
                OptimizerCurve::EpsilonVsAlpha => numeric_cell(adp_gaussian_objective(
                    iterations,
                    target,
                    delta,
                    l2_sensitivity,
                    alpha,
                    cfg.conversion,
                ))?,
                OptimizerCurve::SigmaVsAlpha => {
                    min_sigma_at_alpha(iterations, target, delta, l2_sensitivity, alpha, cfg)?
                }
            });
        }
        table.rows.push(row);
    }
    table.meta("iterations", iterations);
    table.meta("delta", delta);
    table.meta("l2_sensitivity", l2_sensitivity);
    table.meta("targets", join(targets));
    table.meta(
        "mode",
        match mode {
            OptimizerCurve::EpsilonVsAlpha => "epsilon_vs_alpha",
            OptimizerCurve::SigmaVsAlpha => "sigma_vs_alpha",
        },
    );
    table.meta("conversion", cfg.conversion);
    table.meta(
        "sigma_grid",
        format!("{}..{} step {}", cfg.sigma_min, cfg.sigma_max, cfg.sigma_step),
    );
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> AlphaSearchConfig {
        AlphaSearchConfig {
            alpha_max: 60.0,
            sigma_max: 50.0,
            ..Default::default()
        }
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678901234567, 0.0, f64::MAX] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = SweepTable::new(&["alpha", "x"]);
        t.rows.push(vec![Some(2.0), None]);
        t.rows.push(vec![Some(3.0), Some(0.5)]);
        assert_eq!(
            t.to_csv(),
            "alpha,x\n2.0000000000000000e0,\n3.0000000000000000e0,5.0000000000000000e-1\n"
        );
        t.validate().unwrap();
        t.rows.push(vec![Some(3.0), Some(0.5)]);
        assert!(t.validate().is_err());
    }

    #[test]
    fn randomized_response_half_sits_on_conversion_floor() {
        let grid: Vec<f64> = (2..=50).map(f64::from).collect();
        let t = sweep_mechanism_vs_alpha(
            &MechanismSpec::RandomizedResponse { p: 0.5 },
            &grid,
            1e-5,
            ConversionForm::Proof,
        )
        .unwrap();
        t.validate().unwrap();
        assert_eq!(t.rows.len(), grid.len());
        for row in &t.rows {
            let alpha = row[0].unwrap();
            let floor = (1e5f64).ln() / (alpha - 1.0);
            assert!((row[1].unwrap() - floor).abs() <= 1e-14 * floor);
            assert_eq!(row[2], Some(0.0));
        }
    }

    #[test]
    fn overflowing_alphas_become_absent_rows() {
        let grid = [2.0, 20.0, 500.0];
        let t = sweep_mechanism_vs_alpha(
            &MechanismSpec::Gaussian { sigma: 1.0, l2_sensitivity: 1.0 },
            &grid,
            1e-5,
            ConversionForm::Proof,
        )
        .unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.metadata["skipped_alpha"], "500");
    }

    #[test]
    fn iteration_sampling() {
        assert_eq!(iteration_points(5), vec![1, 2, 3, 4, 5]);
        assert_eq!(iteration_points(1000).len(), 1000);
        let p = iteration_points(1_000_000);
        assert_eq!(p.len(), LOG_SAMPLE_POINTS);
        assert_eq!(p[0], 1);
        assert_eq!(*p.last().unwrap(), 1_000_000);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn single_iteration_row() {
        let t = sweep_cumulative_vs_iterations(100.0, 1.0, 1e-5, 1, &small_cfg(), AlphaSelection::PerCurve)
            .unwrap();
        assert_eq!(t.rows.len(), 1);
        let row = &t.rows[0];
        let zcdp = zcdp_to_approx(ZcdpGuarantee { rho: 5e-5 }, 1e-5).unwrap().epsilon;
        assert_eq!(row[3], Some(zcdp));
        assert!(row.iter().all(Option::is_some));
    }

    #[test]
    fn optimizer_curve_shapes() {
        let cfg = small_cfg();
        let flat = sweep_optimizer_curves(100, 1e-5, 1.0, &[1e6], OptimizerCurve::SigmaVsAlpha, &cfg).unwrap();
        // α(α-1)/2 stays below the exponent limit only up to α = 37 at σ = 1.
        for r in &flat.rows {
            let expected = if r[0].unwrap() <= 37.0 { 1.0 } else { 2.0 };
            assert_eq!(r[1], Some(expected), "alpha {:?}", r[0]);
        }
        assert_eq!(flat.columns, vec!["alpha", "epsilon_bound_1000000"]);

        let zero = sweep_optimizer_curves(100, 1e-5, 0.0, &[10.0], OptimizerCurve::EpsilonVsAlpha, &cfg).unwrap();
        let col: Vec<f64> = zero.column("sigma_10").unwrap().into_iter().map(Option::unwrap).collect();
        for (row, v) in zero.rows.iter().zip(&col) {
            let alpha = row[0].unwrap();
            assert!((v - 1e5f64.ln() / (alpha - 1.0)).abs() < 1e-14);
        }
        assert!(col.windows(2).all(|w| w[1] < w[0]));
    }
}
