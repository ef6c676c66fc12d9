//! `trustevo`: sweeps, figures and validation runs for trust-based strategies.

mod commands;
mod config;
mod figures;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::ValidateArgs;
use crate::config::{Flags, Settings};
use crate::figures::Preset;

#[derive(Parser)]
#[command(name = "trustevo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every pool at one game.
    Point,
    /// Evaluate every pool over the full S-T plane.
    SweepGrid,
    /// Sweep the opportunity cost over [0, 0.5] at one game.
    SweepEpsilon,
    /// Sweep the execution error rate over [0, 0.1] at one game.
    SweepError,
    /// Regenerate the data and images of one figure preset.
    Figures {
        #[arg(value_enum)]
        preset: Preset,
    },
    /// Compare agent-based runs with the small-mutation limit (first pool).
    Validate {
        #[arg(
            long = "mutation-rates",
            value_delimiter = ',',
            default_value = "1e-2,1e-3"
        )]
        mutation_rates: Vec<f64>,
        /// Generations at the first mutation rate; scaled up for smaller rates.
        #[arg(long, default_value_t = 6_000_000)]
        generations: u64,
        #[arg(long, default_value_t = 4)]
        replicates: u32,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// Check the payoff engines against each other.
    Selftest {
        /// Monte Carlo interactions per configuration.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Largest accepted |exact - MC| in standard errors.
        #[arg(long = "z-max", default_value_t = 4.0)]
        z_max: f64,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings::resolve(&cli.flags)?;
    if let Some(n) = settings.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Point => commands::point(&settings),
        Command::SweepGrid => commands::sweep_grid(&settings),
        Command::SweepEpsilon => commands::sweep_eps(&settings),
        Command::SweepError => commands::sweep_err(&settings),
        Command::Figures { preset } => figures::run(preset, &settings).map(|()| ExitCode::SUCCESS),
        Command::Validate {
            mutation_rates,
            generations,
            replicates,
            tolerance,
        } => {
            let args = ValidateArgs {
                mutation_rates,
                generations,
                replicates,
                tolerance,
            };
            commands::validate(&settings, &args)
        }
        Command::Selftest { samples, z_max } => commands::selftest(&settings, samples, z_max),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
