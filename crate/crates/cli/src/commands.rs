use std::fs;
use std::path::{Path, PathBuf};

use adp_core::accounting::{adp_to_approx, advanced_delta_split, rdp_to_approx, zcdp_to_approx};
use adp_core::mechanisms::{gaussian_approx_epsilon, gaussian_rdp_epsilon, gaussian_zcdp_rho};
use adp_core::optimizer::{find_alpha_min_epsilon, find_alpha_min_sigma, find_rdp_alpha_min_epsilon};
use adp_core::sweep::{
    sweep_cumulative_vs_iterations, sweep_mechanism_vs_alpha, sweep_optimizer_curves,
};
use adp_core::{
    AdpGuarantee, AlphaSelection, CompositionLedger, Error, Framework, MechanismSpec,
    RdpGuarantee, SweepTable, ZcdpGuarantee,
};
use serde_json::{json, Value};

use crate::config::{require, Format, MechanismKind, RunConfig, Step, SweepKind};
use crate::presets;
use crate::CliError;

/// Effective configuration as echoed next to results. The output path is
/// left out so that the same run written to two places is byte-identical.
fn echo(cfg: &RunConfig) -> Value {
    let mut shown = cfg.clone();
    shown.output = None;
    serde_json::to_value(shown).expect("config serializes")
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_record(cfg: &RunConfig, mut record: Value) -> Result<(), CliError> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Invalid {
            field: "format",
            message: "single records are written as JSON".into(),
        });
    }
    record["config"] = echo(cfg);
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    write_text(cfg.output.as_deref(), &text)
}

fn mechanism(cfg: &RunConfig) -> Result<MechanismSpec, CliError> {
    let sensitivity = cfg.sensitivity_or_default();
    let mech = match require(cfg.mechanism, "mechanism")? {
        MechanismKind::RandomizedResponse => MechanismSpec::RandomizedResponse {
            p: require(cfg.p, "p")?,
        },
        MechanismKind::Laplace => MechanismSpec::Laplace {
            scale_b: require(cfg.scale_b, "scale_b")?,
            l1_sensitivity: sensitivity,
        },
        MechanismKind::Gaussian => MechanismSpec::Gaussian {
            sigma: require(cfg.sigma, "sigma")?,
            l2_sensitivity: sensitivity,
        },
    };
    mech.validate()?;
    Ok(mech)
}

pub fn mech_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let mech = mechanism(cfg)?;
    let alpha = require(cfg.alpha, "alpha")?;
    let delta = cfg.delta_or_default();
    let form = cfg.conversion.unwrap_or_default();
    let adp_epsilon = mech.adp_epsilon(alpha)?;
    let converted = adp_to_approx(AdpGuarantee::new(alpha, adp_epsilon)?, delta, form)?;
    let mut record = json!({
        "mechanism": mech,
        "alpha": alpha,
        "delta": delta,
        "conversion": form,
        "adp_epsilon": adp_epsilon,
        "converted_epsilon": converted.epsilon,
    });
    match mech {
        MechanismSpec::Gaussian {
            sigma,
            l2_sensitivity,
        } => {
            let rdp = gaussian_rdp_epsilon(sigma, l2_sensitivity, alpha)?;
            let rho = gaussian_zcdp_rho(sigma, l2_sensitivity)?;
            record["rdp_epsilon"] = json!(rdp);
            record["rdp_converted_epsilon"] =
                json!(rdp_to_approx(RdpGuarantee::new(alpha, rdp)?, delta)?.epsilon);
            record["zcdp_rho"] = json!(rho);
            record["zcdp_converted_epsilon"] =
                json!(zcdp_to_approx(ZcdpGuarantee::new(rho)?, delta)?.epsilon);
            record["approx_epsilon"] = json!(gaussian_approx_epsilon(sigma, l2_sensitivity, delta)?);
        }
        _ => record["pure_epsilon"] = json!(mech.baseline_epsilon(delta)?),
    }
    emit_record(cfg, record)
}

fn load_ledger(path: &Path) -> Result<CompositionLedger, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Invalid {
        field: "ledger",
        message: e.to_string(),
    })?;
    // Accept either a bare ledger or the record written by `compose`.
    let inner = value.get("ledger").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| CliError::Invalid {
        field: "ledger",
        message: e.to_string(),
    })
}

fn tagged_alpha(steps: &[Step]) -> Option<f64> {
    steps.iter().find_map(|s| match s {
        Step::Tagged { alpha, .. } => Some(*alpha),
        Step::Plain(_) => None,
    })
}

pub fn compose(cfg: &RunConfig) -> Result<(), CliError> {
    let steps = cfg.steps.clone().unwrap_or_default();
    let mut ledger = match &cfg.ledger {
        Some(path) => load_ledger(path)?,
        None => match require(cfg.framework, "framework")? {
            Framework::Adp => CompositionLedger::adp(require(cfg.alpha.or(tagged_alpha(&steps)), "alpha")?)?,
            Framework::Rdp => CompositionLedger::rdp(require(cfg.alpha.or(tagged_alpha(&steps)), "alpha")?)?,
            Framework::Zcdp => CompositionLedger::zcdp(),
            Framework::Advanced => {
                let (dq, ds) = match (cfg.delta_per_query, cfg.delta_slack) {
                    (Some(dq), Some(ds)) => (dq, ds),
                    _ => advanced_delta_split(cfg.delta_or_default(), steps.len().max(1) as u64)?,
                };
                CompositionLedger::advanced(dq, ds)?
            }
        },
    };
    if let (Some(f), Some(_)) = (cfg.framework, &cfg.ledger) {
        if f != ledger.framework() {
            return Err(CliError::Invalid {
                field: "framework",
                message: format!("ledger is {}, not {f}", ledger.framework()),
            });
        }
    }
    if steps.is_empty() && ledger.steps().is_empty() {
        return Err(Error::EmptyLedger.into());
    }
    for step in steps {
        ledger = match (step, ledger.framework()) {
            (Step::Plain(eps), _) => ledger.append(eps)?,
            (Step::Tagged { alpha, epsilon }, Framework::Adp) => {
                ledger.append_adp(AdpGuarantee::new(alpha, epsilon)?)?
            }
            (Step::Tagged { alpha, epsilon }, Framework::Rdp) => {
                ledger.append_rdp(RdpGuarantee::new(alpha, epsilon)?)?
            }
            (Step::Tagged { .. }, f) => {
                return Err(CliError::Invalid {
                    field: "steps",
                    message: format!("`alpha:eps` steps need an adp or rdp ledger, not {f}"),
                })
            }
        };
    }
    let mut record = json!({ "ledger": ledger });
    if let Some(total) = ledger.advanced_delta() {
        record["delta"] = json!(total);
    }
    emit_record(cfg, record)
}

pub fn convert(cfg: &RunConfig) -> Result<(), CliError> {
    let delta = cfg.delta_or_default();
    let framework = require(cfg.framework, "framework")?;
    let out = match framework {
        Framework::Adp => {
            let g = AdpGuarantee::new(require(cfg.alpha, "alpha")?, require(cfg.epsilon, "epsilon")?)?;
            adp_to_approx(g, delta, cfg.conversion.unwrap_or_default())?
        }
        Framework::Rdp => {
            let g = RdpGuarantee::new(require(cfg.alpha, "alpha")?, require(cfg.epsilon, "epsilon")?)?;
            rdp_to_approx(g, delta)?
        }
        Framework::Zcdp => zcdp_to_approx(ZcdpGuarantee::new(require(cfg.rho, "rho")?)?, delta)?,
        Framework::Advanced => {
            return Err(CliError::Invalid {
                field: "framework",
                message: "advanced guarantees are already (ε, δ); use `compose`".into(),
            })
        }
    };
    emit_record(cfg, json!({ "framework": framework, "epsilon": out.epsilon, "delta": out.delta }))
}

pub fn optimize_alpha(cfg: &RunConfig) -> Result<(), CliError> {
    let iterations = require(cfg.iterations, "iterations")?;
    let sigma = require(cfg.sigma, "sigma")?;
    let (delta, sens, search) = (cfg.delta_or_default(), cfg.sensitivity_or_default(), cfg.search());
    let framework = cfg.framework.unwrap_or(Framework::Adp);
    let result = match framework {
        Framework::Adp => find_alpha_min_epsilon(iterations, sigma, delta, sens, &search)?,
        Framework::Rdp => find_rdp_alpha_min_epsilon(iterations, sigma, delta, sens, &search)?,
        other => {
            return Err(CliError::Invalid {
                field: "framework",
                message: format!("α search needs adp or rdp, not {other}"),
            })
        }
    };
    let mut record = serde_json::to_value(result).expect("result serializes");
    record["framework"] = json!(framework);
    emit_record(cfg, record)
}

pub fn optimize_sigma(cfg: &RunConfig) -> Result<(), CliError> {
    let iterations = require(cfg.iterations, "iterations")?;
    let bound = require(cfg.epsilon_bound, "epsilon_bound")?;
    let result = find_alpha_min_sigma(
        iterations,
        bound,
        cfg.delta_or_default(),
        cfg.sensitivity_or_default(),
        &cfg.search(),
    )?;
    let mut record = serde_json::to_value(result).expect("result serializes");
    record["sigma"] = json!(result.objective);
    emit_record(cfg, record)
}

fn explicit_sweep(cfg: &RunConfig) -> Result<SweepTable, CliError> {
    let search = cfg.search();
    let (delta, sens) = (cfg.delta_or_default(), cfg.sensitivity_or_default());
    let kind = require(cfg.kind, "kind")?;
    let table = match kind {
        SweepKind::Mechanism => {
            sweep_mechanism_vs_alpha(&mechanism(cfg)?, &search.alpha_grid(), delta, search.conversion)?
        }
        SweepKind::Cumulative => sweep_cumulative_vs_iterations(
            require(cfg.sigma, "sigma")?,
            sens,
            delta,
            require(cfg.max_iterations, "max_iterations")?,
            &search,
            cfg.alpha_selection.unwrap_or(AlphaSelection::PerCurve),
        )?,
        SweepKind::EpsilonVsAlpha | SweepKind::SigmaVsAlpha => sweep_optimizer_curves(
            require(cfg.iterations, "iterations")?,
            delta,
            sens,
            cfg.targets.as_deref().ok_or(CliError::Invalid {
                field: "targets",
                message: "required but not given".into(),
            })?,
            kind.curve().expect("optimizer sweep"),
            &search,
        )?,
    };
    Ok(table)
}

fn suffixed(path: &Path, label: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn table_json(table: &SweepTable) -> String {
    let mut text = serde_json::to_string_pretty(table).expect("table serializes");
    text.push('\n');
    text
}

/// Writes one or more sweep tables. CSV files get a `<file>.meta.json`
/// sidecar holding the table metadata; JSON output embeds it.
pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let mut tables = match cfg.preset {
        Some(preset) => presets::tables(preset, cfg)?,
        None => vec![(String::new(), explicit_sweep(cfg)?)],
    };
    let config = serde_json::to_string(&echo(cfg)).expect("config serializes");
    for (_, t) in &mut tables {
        t.metadata.insert("config".into(), config.clone());
    }
    let format = cfg.format.unwrap_or(Format::Csv);
    match &cfg.output {
        Some(path) => {
            for (label, table) in &tables {
                let target = if tables.len() == 1 { path.clone() } else { suffixed(path, label) };
                match format {
                    Format::Csv => {
                        write_text(Some(&target), &table.to_csv())?;
                        let meta = serde_json::to_string_pretty(&table.metadata).expect("metadata serializes");
                        write_text(Some(&sidecar(&target)), &(meta + "\n"))?;
                    }
                    Format::Json => write_text(Some(&target), &table_json(table))?,
                }
            }
            Ok(())
        }
        None if tables.len() == 1 => match format {
            Format::Csv => write_text(None, &tables[0].1.to_csv()),
            Format::Json => write_text(None, &table_json(&tables[0].1)),
        },
        None => match format {
            Format::Json => {
                let all: serde_json::Map<String, Value> = tables
                    .iter()
                    .map(|(l, t)| (l.clone(), serde_json::to_value(t).expect("table serializes")))
                    .collect();
                let mut text = serde_json::to_string_pretty(&all).expect("tables serialize");
                text.push('\n');
                write_text(None, &text)
            }
            Format::Csv => Err(CliError::Invalid {
                field: "output",
                message: format!(
                    "this sweep yields {} tables; pass --output or narrow it to one curve",
                    tables.len()
                ),
            }),
        },
    }
}
