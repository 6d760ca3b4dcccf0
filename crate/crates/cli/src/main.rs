mod commands;
mod config;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use adp_core::{AlphaSelection, ConversionForm, ErrorKind, Framework};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{Format, MechanismKind, RunConfig, Step, SweepKind};
use presets::Preset;

#[derive(Debug)]
pub enum CliError {
    Core(adp_core::Error),
    Invalid { field: &'static str, message: String },
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Invalid { field, message } => write!(f, "invalid `{field}`: {message}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<adp_core::Error> for CliError {
    fn from(e: adp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numeric => 3,
                ErrorKind::Infeasible => 4,
            },
            CliError::Invalid { .. } => 2,
            CliError::Io(_) => 1,
        }
    }

    fn report(&self) -> serde_json::Value {
        let (kind, field) = match self {
            CliError::Core(e) => (
                match e.kind() {
                    ErrorKind::Validation => "validation",
                    ErrorKind::Numeric => "numeric",
                    ErrorKind::Infeasible => "infeasible",
                },
                e.field(),
            ),
            CliError::Invalid { field, .. } => ("validation", Some(*field)),
            CliError::Io(_) => ("io", None),
        };
        json!({ "error": { "kind": kind, "field": field, "message": self.to_string() } })
    }
}

/// Privacy accounting with alpha differential privacy.
#[derive(Debug, Parser)]
#[command(name = "adp", version)]
struct Cli {
    #[command(flatten)]
    shared: SharedArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SharedArgs {
    /// JSON file with default parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Query sensitivity (ℓ1 for Laplace, ℓ2 for Gaussian).
    #[arg(long, global = true)]
    sensitivity: Option<f64>,
    #[arg(long, global = true)]
    alpha_min: Option<f64>,
    #[arg(long, global = true)]
    alpha_max: Option<f64>,
    #[arg(long, global = true)]
    alpha_step: Option<f64>,
    /// ADP to (ε, δ) bound: `proof` or `statement`.
    #[arg(long, global = true)]
    conversion: Option<ConversionForm>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-query cost of one mechanism at one α.
    MechEval(MechArgs),
    /// Compose per-query costs into a ledger.
    Compose(ComposeArgs),
    /// Convert an ADP, RDP or zCDP guarantee to (ε, δ)-DP.
    Convert(ConvertArgs),
    /// α minimising the converted cost of repeated Gaussian queries.
    OptimizeAlpha(OptimizeAlphaArgs),
    /// Smallest Gaussian σ (and its α) meeting an ε budget.
    OptimizeSigma(OptimizeSigmaArgs),
    /// Tables behind the comparison figures.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct MechArgs {
    #[arg(long, value_enum)]
    mechanism: Option<MechanismKind>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    scale_b: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct ComposeArgs {
    /// adp, rdp, zcdp or advanced.
    #[arg(long)]
    framework: Option<Framework>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated costs, each `eps` or `alpha:eps`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    steps: Option<Vec<Step>>,
    /// Existing ledger JSON to extend.
    #[arg(long)]
    ledger: Option<PathBuf>,
    #[arg(long)]
    delta_per_query: Option<f64>,
    #[arg(long)]
    delta_slack: Option<f64>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// adp, rdp or zcdp.
    #[arg(long)]
    framework: Option<Framework>,
    #[arg(long)]
    alpha: Option<f64>,
    /// ADP ε or RDP ε̄.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Debug, Args)]
struct OptimizeAlphaArgs {
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// adp (default) or rdp.
    #[arg(long)]
    framework: Option<Framework>,
}

#[derive(Debug, Args)]
struct OptimizeSigmaArgs {
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    epsilon_bound: Option<f64>,
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    sigma_max: Option<f64>,
    #[arg(long)]
    sigma_step: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Explicit sweep when no preset is given.
    #[arg(long, value_enum)]
    kind: Option<SweepKind>,
    #[arg(long, value_enum)]
    mechanism: Option<MechanismKind>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    scale_b: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    max_iterations: Option<u64>,
    /// σ values (epsilon-vs-alpha) or ε bounds (sigma-vs-alpha).
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    alpha_selection: Option<Selection>,
    #[arg(long)]
    sigma_min: Option<f64>,
    #[arg(long)]
    sigma_max: Option<f64>,
    #[arg(long)]
    sigma_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Selection {
    PerCurve,
    PerIteration,
}

impl Cli {
    /// Flags given on the command line, as a config layer.
    fn overrides(&self) -> RunConfig {
        let s = &self.shared;
        let mut cfg = RunConfig {
            output: s.output.clone(),
            format: s.format,
            delta: s.delta,
            sensitivity: s.sensitivity,
            alpha_min: s.alpha_min,
            alpha_max: s.alpha_max,
            alpha_step: s.alpha_step,
            conversion: s.conversion,
            ..Default::default()
        };
        match &self.command {
            Command::MechEval(a) => {
                cfg.mechanism = a.mechanism;
                cfg.p = a.p;
                cfg.scale_b = a.scale_b;
                cfg.sigma = a.sigma;
                cfg.alpha = a.alpha;
            }
            Command::Compose(a) => {
                cfg.framework = a.framework;
                cfg.alpha = a.alpha;
                cfg.steps = a.steps.clone();
                cfg.ledger = a.ledger.clone();
                cfg.delta_per_query = a.delta_per_query;
                cfg.delta_slack = a.delta_slack;
            }
            Command::Convert(a) => {
                cfg.framework = a.framework;
                cfg.alpha = a.alpha;
                cfg.epsilon = a.epsilon;
                cfg.rho = a.rho;
            }
            Command::OptimizeAlpha(a) => {
                cfg.iterations = a.iterations;
                cfg.sigma = a.sigma;
                cfg.framework = a.framework;
            }
            Command::OptimizeSigma(a) => {
                cfg.iterations = a.iterations;
                cfg.epsilon_bound = a.epsilon_bound;
                cfg.sigma_min = a.sigma_min;
                cfg.sigma_max = a.sigma_max;
                cfg.sigma_step = a.sigma_step;
            }
            Command::Sweep(a) => {
                cfg.preset = a.preset;
                cfg.kind = a.kind;
                cfg.mechanism = a.mechanism;
                cfg.p = a.p;
                cfg.scale_b = a.scale_b;
                cfg.sigma = a.sigma;
                cfg.iterations = a.iterations;
                cfg.max_iterations = a.max_iterations;
                cfg.targets = a.targets.clone();
                cfg.alpha_selection = a.alpha_selection.map(|s| match s {
                    Selection::PerCurve => AlphaSelection::PerCurve,
                    Selection::PerIteration => AlphaSelection::PerIteration,
                });
                cfg.sigma_min = a.sigma_min;
                cfg.sigma_max = a.sigma_max;
                cfg.sigma_step = a.sigma_step;
            }
        }
        cfg
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.shared.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.merge(cli.overrides());
    match cli.command {
        Command::MechEval(_) => commands::mech_eval(&cfg),
        Command::Compose(_) => commands::compose(&cfg),
        Command::Convert(_) => commands::convert(&cfg),
        Command::OptimizeAlpha(_) => commands::optimize_alpha(&cfg),
        Command::OptimizeSigma(_) => commands::optimize_sigma(&cfg),
        Command::Sweep(_) => commands::sweep(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
