//! `geomdd`: runs the experiments of the geometric-gate/DD study and
//! writes plot-ready CSV plus a JSON manifest.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Experiment, ExperimentConfig};
use geomdd_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    match e {
        Error::Propagation { source, .. } => is_config_error(source),
        Error::InvalidParameter { .. }
        | Error::InvalidSchedule(_)
        | Error::InvalidSequence(_)
        | Error::Unsupported(_)
        | Error::Perturbative(_)
        | Error::StepTooLarge { .. } => true,
        _ => false,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_config_error(&e) {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "geomdd", version, about = "Geometric gates with dynamical decoupling: experiment runner")]
struct Cli {
    /// JSON configuration file; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set noise.g2_khz=1`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Full vs reduced model populations.
    CompareModels,
    /// Final fidelity and F(t) per DD level.
    GateFidelity,
    /// Fidelity surface over (G1, G2) per DD level.
    RobustnessSweep,
    /// Decoupling error against window length and its log-log slope.
    DdScaling,
    /// SiV-phonon coupling of a waveguide mode.
    WaveguideG,
    /// Print the effective configuration as JSON and exit.
    ShowConfig,
}

impl Command {
    fn experiment(self) -> Option<Experiment> {
        Some(match self {
            Command::CompareModels => Experiment::CompareModels,
            Command::GateFidelity => Experiment::GateFidelity,
            Command::RobustnessSweep => Experiment::RobustnessSweep,
            Command::DdScaling => Experiment::DdScaling,
            Command::WaveguideG => Experiment::WaveguideG,
            Command::ShowConfig => return None,
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = cli.out {
        cfg.output = out;
    }
    let experiment = match cli.command {
        Some(Command::ShowConfig) => {
            let text = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
            println!("{text}");
            return Ok(());
        }
        Some(c) => c.experiment().expect("experiment command"),
        None => cfg.experiment,
    };
    cfg.experiment = experiment;
    let mut out = output::Output::create(&cfg.output)?;
    let summary = commands::run(experiment, &cfg, &mut out)?;
    let manifest = out.finish(experiment.name(), &cfg)?;
    println!("{}: {summary}", experiment.name());
    println!("wrote {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geomdd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
