//! Named parameter regimes for the `figures` subcommand, one directory each.

use anyhow::Result;
use clap::ValueEnum;
use trustevo::output::{render_heatmap, sweep_table};
use trustevo::sweep::{
    five_pool, linspace, pool_label, run_grid, sweep_epsilon, sweep_error, three_pool, two_pool,
    GridSpec, ModelParams, REPRESENTATIVE_POINTS,
};
use trustevo::{InteractionParams, Strategy, TrustParams};

use crate::commands::{describe, grid_images, line_images, Run, EPSILON_RANGE, ERROR_RANGE};
use crate::config::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// TFT frequency and the effect of adding TFT over the S-T plane.
    Fig1,
    /// Cooperation attributed to TFT over the S-T plane.
    Fig2,
    /// Opportunity-cost sweeps at the representative games.
    Fig3,
    /// TUC frequency and the effect of trust over the S-T plane.
    Fig4,
    /// Error-rate sweeps at the representative games.
    Fig5,
    /// Error-rate sweeps for long interactions and for high trustfulness.
    Fig6,
    All,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::All => "all",
        }
    }
}

pub fn run(preset: Preset, settings: &Settings) -> Result<()> {
    let all = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
    ];
    let presets: Vec<Preset> = if preset == Preset::All {
        all.to_vec()
    } else {
        vec![preset]
    };
    for p in presets {
        match p {
            Preset::Fig1 | Preset::Fig2 => tft_grids(p, settings)?,
            Preset::Fig3 => {
                let mut run = Run::new(
                    &settings.out.join("fig3"),
                    "fig3",
                    settings,
                    settings.model,
                    &trust_pools(),
                );
                representative_sweeps(&mut run, settings, settings.model, "epsilon", "")?;
                run.finish()?
            }
            Preset::Fig4 => trust_grid(settings)?,
            Preset::Fig5 => {
                let model = with_epsilon(settings.model, 0.25)?;
                let mut run = Run::new(
                    &settings.out.join("fig5"),
                    "fig5",
                    settings,
                    model,
                    &trust_pools(),
                );
                representative_sweeps(&mut run, settings, model, "mu_e", "")?;
                run.finish()?
            }
            Preset::Fig6 => {
                let mut long = settings.model;
                long.interaction = InteractionParams::new(100, long.interaction.epsilon, 0.0)?;
                long.trust = TrustParams::new(long.trust.theta, 0.25)?;
                let mut trustful = settings.model;
                trustful.interaction =
                    InteractionParams::new(50, trustful.interaction.epsilon, 0.0)?;
                trustful.trust = TrustParams::new(trustful.trust.theta, 0.04)?;
                let mut run = Run::new(
                    &settings.out.join("fig6"),
                    "fig6",
                    settings,
                    settings.model,
                    &trust_pools(),
                );
                run.setting(
                    "variants",
                    "r100_: rounds=100 p=0.25; p0.04_: rounds=50 p=0.04",
                );
                representative_sweeps(&mut run, settings, long, "mu_e", "r100_")?;
                representative_sweeps(&mut run, settings, trustful, "mu_e", "p0.04_")?;
                run.finish()?
            }
            Preset::All => unreachable!(),
        }
    }
    Ok(())
}

fn with_epsilon(mut model: ModelParams, eps: f64) -> Result<ModelParams> {
    model.interaction =
        InteractionParams::new(model.interaction.rounds, eps, model.interaction.mu_e)?;
    Ok(model)
}

fn tft_grids(preset: Preset, settings: &Settings) -> Result<()> {
    let pools = vec![two_pool(), three_pool()];
    let dir = settings.out.join(preset.name());
    let mut run = Run::new(&dir, preset.name(), settings, settings.model, &pools);
    run.setting("epsilons", "[0, 0.25]");
    if preset == Preset::Fig2 {
        run.setting(
            "coop.TFT",
            "interpretation: sigma(TFT) times TFT self-play cooperation",
        );
    }
    let label = pool_label(&three_pool());
    for eps in [0.0, 0.25] {
        let model = with_epsilon(settings.model, eps)?;
        let result = run_grid(&GridSpec::full_plane(
            settings.grid_res,
            model,
            pools.clone(),
        ))?;
        let table = sweep_table(&result);
        run.csv(&format!("grid_eps{eps}.csv"), &table)?;
        let quantities = match preset {
            Preset::Fig1 => vec![format!("{label}.sigma.TFT"), result.delta_label(0)],
            _ => vec![format!("{label}.coop.TFT"), format!("{label}.coop")],
        };
        for q in quantities {
            render_heatmap(
                &table,
                &q,
                &run.path(&format!("eps{eps}_{q}.svg")),
                &describe(&model),
            )?;
        }
    }
    run.finish()
}

fn trust_grid(settings: &Settings) -> Result<()> {
    let pools = trust_pools();
    let model = with_epsilon(settings.model, 0.25)?;
    let dir = settings.out.join("fig4");
    let mut run = Run::new(&dir, "fig4", settings, model, &pools);
    let result = run_grid(&GridSpec::full_plane(
        settings.grid_res,
        model,
        pools.clone(),
    ))?;
    let table = sweep_table(&result);
    run.csv("grid.csv", &table)?;
    grid_images(&mut run, &result, &table, "")?;
    run.finish()
}

fn trust_pools() -> Vec<Vec<Strategy>> {
    vec![three_pool(), five_pool()]
}

fn representative_sweeps(
    run: &mut Run,
    settings: &Settings,
    model: ModelParams,
    axis: &str,
    prefix: &str,
) -> Result<()> {
    let pools = trust_pools();
    let (lo, hi) = if axis == "epsilon" {
        EPSILON_RANGE
    } else {
        ERROR_RANGE
    };
    run.setting(&format!("{prefix}{axis}_range"), format!("{:?}", (lo, hi)));
    let values = linspace(lo, hi, settings.steps);
    for point in REPRESENTATIVE_POINTS {
        let g = point.game();
        run.setting(
            &format!("{prefix}point.{}", point.name),
            format!("T={} S={}", point.t, point.s),
        );
        let result = if axis == "epsilon" {
            sweep_epsilon(&g, &model, &pools, &values)?
        } else {
            sweep_error(&g, &model, &pools, &values)?
        };
        let table = sweep_table(&result);
        let stem = format!("{prefix}{}", point.name);
        run.csv(&format!("{stem}.csv"), &table)?;
        line_images(run, &result, &table, axis, &format!("{stem}_"))?;
    }
    Ok(())
}
