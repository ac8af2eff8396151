use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use convex_pseudolattice::experiments::{execute, ExperimentConfig, Mode};
use convex_pseudolattice::ExperimentError;

/// Randomized strictly convex chains through Poisson pseudo-lattices.
#[derive(Parser, Debug)]
#[command(name = "pseudolattice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the construction in the root triangle, one run per trial.
    Simulate(Common),
    /// Assemble the multi-wedge curve along a circle.
    Theorem(Common),
    /// Run the verification suite.
    Verify(Common),
    /// Draw a chain pair to SVG.
    Render(Common),
    /// Write step-level CSV for every trial and re-ingest it.
    Sweep(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config field, e.g. `--set horizon=200 --set tolerances.area_sigmas=4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn build_config(mode: Mode, args: &Common) -> Result<ExperimentConfig, ExperimentError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.mode = mode;
    for spec in &args.overrides {
        config.apply_override(spec)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::Theorem(a) => (Mode::Theorem, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Render(a) => (Mode::Render, a),
        Command::Sweep(a) => (Mode::Sweep, a),
    };
    let outcome = build_config(mode, args).and_then(|config| execute(&config));
    match outcome {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            println!("outputs written to {}", outcome.manifest.config.out.display());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
