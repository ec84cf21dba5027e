use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use repwalk::{execute, Experiment, ExperimentConfig, LabResult, PartialConfig};

/// Monte Carlo, ODE and coupling experiments for two exponentially repelling random walks.
#[derive(Debug, Parser)]
#[command(name = "repwalk", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Flat JSON config; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Allow recurrence runs for beta in (1, 2).
    #[arg(long)]
    exploratory: bool,
    #[command(flatten)]
    settings: PartialConfig,
}

fn run(cli: Cli) -> LabResult<()> {
    let file = match &cli.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        experiment: Some(cli.experiment),
        exploratory: cli.exploratory.then_some(true),
        ..cli.settings
    };
    let cfg = ExperimentConfig::resolve(file.overlay(flags))?;
    let outcome = execute(&cfg)?;
    println!("{}", outcome.summary_path().display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
