//! Parameter resolution: built-in defaults, then a TOML file, then flags.
//!
//! The file uses the flag names as keys (`mu_e`, `pop_size` and `grid_res`
//! take underscores), for example
//!
//! ```toml
//! T = 1.5
//! S = -0.5
//! epsilon = 0.25
//! pools = "AllC,AllD,TFT;AllC,AllD,TFT,TUC,TUD"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use trustevo::sweep::{parse_pools, ModelParams, PD_POINT};
use trustevo::{EvolutionParams, GameParams, InteractionParams, Strategy, TrustParams};

pub const DEFAULT_POOLS: &str = "AllC,AllD,TFT;AllC,AllD,TFT,TUC,TUD";

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Temptation to defect, in [0, 2].
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Sucker's payoff, in [-1, 1].
    #[arg(long = "S", global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Trust threshold.
    #[arg(long, global = true)]
    pub theta: Option<u32>,
    /// Check probability once trusting.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Opportunity cost per check.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Execution error rate.
    #[arg(long = "mu-e", global = true)]
    pub mu_e: Option<f64>,
    /// Rounds per interaction.
    #[arg(long, global = true)]
    pub rounds: Option<u32>,
    /// Selection intensity.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Population size.
    #[arg(long = "pop-size", global = true)]
    pub pop_size: Option<u32>,
    /// Pools as comma-separated strategies, pools separated by ';'.
    #[arg(long, global = true)]
    pub pools: Option<String>,
    /// Cells per axis for S-T grids.
    #[arg(long = "grid-res", global = true)]
    pub grid_res: Option<usize>,
    /// Points in epsilon and error-rate sweeps.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// TOML file with any of the above keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[serde(rename = "S")]
    pub s: Option<f64>,
    pub theta: Option<u32>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub mu_e: Option<f64>,
    pub rounds: Option<u32>,
    pub beta: Option<f64>,
    pub pop_size: Option<u32>,
    pub pools: Option<String>,
    pub grid_res: Option<usize>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub game: GameParams,
    pub model: ModelParams,
    pub pools: Vec<Vec<Strategy>>,
    pub grid_res: usize,
    pub steps: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let tp = TrustParams::default();
        let ip = InteractionParams::default();
        let ep = EvolutionParams::default();

        let game = GameParams::new(
            flags.t.or(file.t).unwrap_or(PD_POINT.t),
            flags.s.or(file.s).unwrap_or(PD_POINT.s),
        )?;
        let trust = TrustParams::new(
            flags.theta.or(file.theta).unwrap_or(tp.theta),
            flags.p.or(file.p).unwrap_or(tp.p),
        )?;
        let interaction = InteractionParams::new(
            flags.rounds.or(file.rounds).unwrap_or(ip.rounds),
            flags.epsilon.or(file.epsilon).unwrap_or(ip.epsilon),
            flags.mu_e.or(file.mu_e).unwrap_or(ip.mu_e),
        )?;
        let evolution = EvolutionParams::new(
            flags.pop_size.or(file.pop_size).unwrap_or(ep.pop_size),
            flags.beta.or(file.beta).unwrap_or(ep.beta),
        )?;
        let pools_text = flags
            .pools
            .clone()
            .or(file.pools)
            .unwrap_or_else(|| DEFAULT_POOLS.into());
        let pools = parse_pools(&pools_text)?;

        let grid_res = flags.grid_res.or(file.grid_res).unwrap_or(41);
        let steps = flags.steps.or(file.steps).unwrap_or(21);
        anyhow::ensure!(
            grid_res >= 2,
            "--grid-res must be at least 2 (got {grid_res})"
        );
        anyhow::ensure!(steps >= 2, "--steps must be at least 2 (got {steps})");
        let workers = flags.workers.or(file.workers);
        if let Some(w) = workers {
            anyhow::ensure!(w >= 1, "--workers must be at least 1");
        }

        Ok(Settings {
            game,
            model: ModelParams {
                trust,
                interaction,
                evolution,
            },
            pools,
            grid_res,
            steps,
            out: flags
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: flags.seed.or(file.seed).unwrap_or(1),
            workers,
        })
    }
}
