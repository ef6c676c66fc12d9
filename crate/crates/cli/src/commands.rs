use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trustevo::abm::{simulate, SimConfig};
use trustevo::observables::evaluate_pool;
use trustevo::output::{
    emit_csv, render_heatmap, render_lines, sweep_table, Cell, LinePlot, RunManifest, Table,
};
use trustevo::payoff::{closed_form_entry, exact_pair_payoff, mc_pair_payoff};
use trustevo::sweep::{
    linspace, pool_label, run_grid, run_point, sweep_epsilon, sweep_error, GridSpec, ModelParams,
    SweepResult, REPRESENTATIVE_POINTS,
};
use trustevo::{GameParams, InteractionParams, Strategy};

use crate::config::Settings;

pub const EPSILON_RANGE: (f64, f64) = (0.0, 0.5);
pub const ERROR_RANGE: (f64, f64) = (0.0, 0.1);

/// Collects written files into a manifest.
pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn new(
        dir: &Path,
        command: &str,
        settings: &Settings,
        model: ModelParams,
        pools: &[Vec<Strategy>],
    ) -> Self {
        let mut manifest = RunManifest::new(command, model, pools);
        let mut set = |k: &str, v: String| manifest.settings.insert(k.to_string(), v);
        set("T", settings.game.t().to_string());
        set("S", settings.game.s().to_string());
        set("grid_res", settings.grid_res.to_string());
        set("steps", settings.steps.to_string());
        set("seed", settings.seed.to_string());
        Run {
            dir: dir.to_path_buf(),
            manifest,
        }
    }

    pub fn setting(&mut self, key: &str, value: impl ToString) {
        self.manifest
            .settings
            .insert(key.to_string(), value.to_string());
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        emit_csv(table, &self.path(name))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        let path = self.dir.join("manifest.toml");
        self.manifest.outputs.sort();
        self.manifest.write(&path)?;
        println!(
            "wrote {} files to {}",
            self.manifest.outputs.len() + 1,
            self.dir.display()
        );
        Ok(())
    }
}

pub fn describe(model: &ModelParams) -> String {
    format!(
        "theta={} p={} rounds={} epsilon={} mu_e={} beta={} N={}",
        model.trust.theta,
        model.trust.p,
        model.interaction.rounds,
        model.interaction.epsilon,
        model.interaction.mu_e,
        model.evolution.beta,
        model.evolution.pop_size
    )
}

fn delta_columns(result: &SweepResult) -> Vec<String> {
    (0..result.deltas.len())
        .map(|k| result.delta_label(k))
        .collect()
}

pub fn point(settings: &Settings) -> Result<ExitCode> {
    let result = run_point(&settings.game, &settings.model, &settings.pools)?;
    let mut run = Run::new(
        &settings.out,
        "point",
        settings,
        settings.model,
        &settings.pools,
    );
    run.csv("point.csv", &sweep_table(&result))?;
    let rec = &result.records[0];
    println!(
        "T={} S={} ({})  {}",
        rec.t,
        rec.s,
        rec.class,
        describe(&settings.model)
    );
    for pr in &rec.pools {
        let weights: Vec<String> = pr
            .pool
            .iter()
            .zip(&pr.sigma.weights)
            .map(|(s, w)| format!("{s}={w:.4}"))
            .collect();
        println!(
            "  {:<24} coop={:.4}  sigma: {}",
            pool_label(&pr.pool),
            pr.coop_frequency,
            weights.join(" ")
        );
    }
    for (k, d) in rec.deltas.iter().enumerate() {
        println!("  {} = {d:+.4}", result.delta_label(k));
    }
    run.finish()?;
    Ok(ExitCode::SUCCESS)
}

/// Heatmaps of every cooperation, delta and sigma column of a grid.
pub fn grid_images(run: &mut Run, result: &SweepResult, table: &Table, prefix: &str) -> Result<()> {
    let desc = describe(&result.params);
    let mut quantities: Vec<String> = result
        .pools
        .iter()
        .map(|p| format!("{}.coop", pool_label(p)))
        .collect();
    quantities.extend(delta_columns(result));
    if let Some(last) = result.pools.last() {
        let label = pool_label(last);
        quantities.extend(last.iter().map(|s| format!("{label}.sigma.{s}")));
    }
    for q in quantities {
        render_heatmap(table, &q, &run.path(&format!("{prefix}{q}.svg")), &desc)?;
    }
    Ok(())
}

pub fn sweep_grid(settings: &Settings) -> Result<ExitCode> {
    let spec = GridSpec::full_plane(settings.grid_res, settings.model, settings.pools.clone());
    let result = run_grid(&spec)?;
    let table = sweep_table(&result);
    let mut run = Run::new(
        &settings.out,
        "sweep-grid",
        settings,
        settings.model,
        &settings.pools,
    );
    run.csv("grid.csv", &table)?;
    grid_images(&mut run, &result, &table, "grid_")?;
    run.finish()?;
    Ok(ExitCode::SUCCESS)
}

/// Cooperation per pool with each delta shaded, then sigma of the largest pool.
pub fn line_images(
    run: &mut Run,
    result: &SweepResult,
    table: &Table,
    x: &str,
    prefix: &str,
) -> Result<()> {
    let desc = describe(&result.params);
    for &(with, without) in &result.deltas {
        let a = format!("{}.coop", pool_label(&result.pools[with]));
        let b = format!("{}.coop", pool_label(&result.pools[without]));
        let title = format!("cooperation vs {x}");
        let plot = LinePlot {
            title: &title,
            x,
            series: vec![&a, &b],
            shade: Some((&a, &b)),
        };
        let name = format!(
            "{prefix}coop_{}_vs_{}.svg",
            pool_label(&result.pools[with]),
            pool_label(&result.pools[without])
        );
        render_lines(table, &plot, &run.path(&name), &desc)?;
    }
    if let Some(last) = result.pools.last() {
        let label = pool_label(last);
        let cols: Vec<String> = last.iter().map(|s| format!("{label}.sigma.{s}")).collect();
        let title = format!("strategy frequencies vs {x}");
        let plot = LinePlot {
            title: &title,
            x,
            series: cols.iter().map(String::as_str).collect(),
            shade: None,
        };
        render_lines(
            table,
            &plot,
            &run.path(&format!("{prefix}sigma_{label}.svg")),
            &desc,
        )?;
    }
    Ok(())
}

pub fn sweep_eps(settings: &Settings) -> Result<ExitCode> {
    let values = linspace(EPSILON_RANGE.0, EPSILON_RANGE.1, settings.steps);
    let result = sweep_epsilon(&settings.game, &settings.model, &settings.pools, &values)?;
    let table = sweep_table(&result);
    let mut run = Run::new(
        &settings.out,
        "sweep-epsilon",
        settings,
        settings.model,
        &settings.pools,
    );
    run.setting("epsilon_range", format!("{:?}", EPSILON_RANGE));
    run.csv("epsilon.csv", &table)?;
    line_images(&mut run, &result, &table, "epsilon", "epsilon_")?;
    run.finish()?;
    Ok(ExitCode::SUCCESS)
}

pub fn sweep_err(settings: &Settings) -> Result<ExitCode> {
    let values = linspace(ERROR_RANGE.0, ERROR_RANGE.1, settings.steps);
    let result = sweep_error(&settings.game, &settings.model, &settings.pools, &values)?;
    let table = sweep_table(&result);
    let mut run = Run::new(
        &settings.out,
        "sweep-error",
        settings,
        settings.model,
        &settings.pools,
    );
    run.setting("mu_e_range", format!("{:?}", ERROR_RANGE));
    run.csv("error.csv", &table)?;
    line_images(&mut run, &result, &table, "mu_e", "error_")?;
    run.finish()?;
    Ok(ExitCode::SUCCESS)
}

pub struct ValidateArgs {
    pub mutation_rates: Vec<f64>,
    pub generations: u64,
    pub replicates: u32,
    pub tolerance: f64,
}

/// Agent-based runs against the small-mutation stationary distribution.
/// Run length scales inversely with the mutation rate.
pub fn validate(settings: &Settings, args: &ValidateArgs) -> Result<ExitCode> {
    anyhow::ensure!(!args.mutation_rates.is_empty(), "no mutation rates given");
    let pool = settings.pools[0].clone();
    let model = settings.model;
    let analytic = evaluate_pool(
        &pool,
        &settings.game,
        &model.trust,
        &model.interaction,
        &model.evolution,
    )?;
    let base = args.mutation_rates[0];

    let mut columns = vec![
        "mutation_rate".to_string(),
        "generations".into(),
        "replicates".into(),
    ];
    for s in &pool {
        columns.extend([
            format!("abm.{s}"),
            format!("stderr.{s}"),
            format!("sigma.{s}"),
        ]);
    }
    columns.extend([
        "abm.coop".into(),
        "sigma.coop".into(),
        "max_deviation".into(),
    ]);
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };

    println!(
        "pool {} at T={} S={}  {}",
        pool_label(&pool),
        settings.game.t(),
        settings.game.s(),
        describe(&model)
    );
    let mut devs = Vec::new();
    for &rate in &args.mutation_rates {
        let generations = (args.generations as f64 * base / rate).round() as u64;
        let cfg = SimConfig {
            pool: pool.clone(),
            game: settings.game,
            trust: model.trust,
            interaction: model.interaction,
            evolution: model.evolution,
            mutation_rate: rate,
            generations,
            burn_in: generations / 10,
            replicates: args.replicates,
            seed: settings.seed,
        };
        let sim = simulate(&cfg)?;
        let dev = sim
            .frequencies
            .iter()
            .zip(&analytic.sigma.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        devs.push(dev);
        let mut row = vec![
            Cell::Num(rate),
            Cell::Int(generations as i64),
            Cell::Int(args.replicates as i64),
        ];
        for k in 0..pool.len() {
            row.extend([
                Cell::Num(sim.frequencies[k]),
                Cell::Num(sim.frequency_stderr[k]),
                Cell::Num(analytic.sigma.weights[k]),
            ]);
        }
        row.extend([
            Cell::Num(sim.coop_frequency),
            Cell::Num(analytic.coop_frequency),
            Cell::Num(dev),
        ]);
        table.rows.push(row);
        let shown: Vec<String> = sim.frequencies.iter().map(|f| format!("{f:.4}")).collect();
        println!(
            "  rate {rate:e} ({generations} generations): [{}]  max |dev| {dev:.4}",
            shown.join(", ")
        );
    }
    let sigma: Vec<String> = analytic
        .sigma
        .weights
        .iter()
        .map(|f| format!("{f:.4}"))
        .collect();
    println!("  analytic sigma: [{}]", sigma.join(", "));

    let mut run = Run::new(
        &settings.out,
        "validate",
        settings,
        model,
        std::slice::from_ref(&pool),
    );
    run.setting("mutation_rates", format!("{:?}", args.mutation_rates));
    run.setting("generations_at_first_rate", args.generations);
    run.setting("replicates", args.replicates);
    run.csv("validate.csv", &table)?;
    run.finish()?;

    let last = *devs.last().expect("non-empty");
    let shrinking = devs.windows(2).all(|w| w[1] <= w[0]);
    let ok = last <= args.tolerance && shrinking;
    println!(
        "{} final deviation {last:.4} (tolerance {}), {}",
        if ok { "PASS" } else { "FAIL" },
        args.tolerance,
        if shrinking {
            "shrinking with the mutation rate"
        } else {
            "not monotone in the mutation rate"
        }
    );
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// Closed form against exact propagation, then Monte Carlo against exact.
pub fn selftest(settings: &Settings, samples: u64, z_max: f64) -> Result<ExitCode> {
    let tp = settings.model.trust;
    let rounds = settings.model.interaction.rounds;
    let mut worst: f64 = 0.0;
    for point in REPRESENTATIVE_POINTS {
        let g = point.game();
        for eps in [0.0, 0.25, 0.5] {
            let ip = InteractionParams::new(rounds, eps, 0.0)?;
            for a in Strategy::ALL {
                for b in Strategy::ALL {
                    let exact = exact_pair_payoff(a, b, &g, &tp, &ip).payoff_a;
                    worst =
                        worst.max((exact - closed_form_entry(a, b, &g, &tp, rounds, eps)).abs());
                }
            }
        }
    }
    let engines_ok = worst <= 1e-9;
    println!(
        "{} closed form vs exact: max |diff| {worst:.3e} over 225 entries",
        verdict(engines_ok)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut mc_ok = true;
    for k in 0..10 {
        let a = Strategy::ALL[rng.gen_range(0..5)];
        let b = Strategy::ALL[rng.gen_range(0..5)];
        let g = GameParams::new(rng.gen_range(0.0..=2.0), rng.gen_range(-1.0..=1.0))?;
        let ip =
            InteractionParams::new(rounds, rng.gen_range(0.0..=0.5), rng.gen_range(0.0..=0.1))?;
        let exact = exact_pair_payoff(a, b, &g, &tp, &ip);
        let mc = mc_pair_payoff(a, b, &g, &tp, &ip, samples, settings.seed.wrapping_add(k));
        let z =
            (exact.payoff_a - mc.mean.payoff_a).abs() / mc.stderr.payoff_a.max(f64::MIN_POSITIVE);
        let ok = z <= z_max || (exact.payoff_a - mc.mean.payoff_a).abs() < 1e-12;
        mc_ok &= ok;
        println!(
            "{} {a} vs {b} at T={:.3} S={:.3} eps={:.3} mu_e={:.4}: exact {:.6}, MC {:.6} ± {:.6} (z {z:.2})",
            verdict(ok),
            g.t(),
            g.s(),
            ip.epsilon,
            ip.mu_e,
            exact.payoff_a,
            mc.mean.payoff_a,
            mc.stderr.payoff_a
        );
    }
    Ok(if engines_ok && mc_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
