//! Browser bindings: S-T heatmaps, parameter sweeps and the pair payoff
//! matrix, all for the three-strategy baseline against the five-strategy
//! pool. Inputs and outputs are JSON strings so the page needs no glue code.

use serde::{Deserialize, Serialize};
use trustevo::observables::evaluate_pool_with;
use trustevo::output::{heatmap_svg, lines_svg, sweep_table, LinePlot};
use trustevo::sweep::{
    five_pool, linspace, pool_label, run_grid, sweep_epsilon, sweep_error, three_pool, GridSpec,
    ModelParams,
};
use trustevo::{EvolutionParams, GameParams, InteractionParams, ProfileTable, TrustParams};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoParams {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub theta: u32,
    pub p: f64,
    pub rounds: u32,
    pub epsilon: f64,
    pub mu_e: f64,
    pub beta: f64,
    pub pop_size: u32,
    pub resolution: usize,
    pub steps: usize,
    /// `delta`, `coop` or `sigma.<strategy>` for heatmaps.
    pub quantity: String,
    /// `epsilon` or `mu_e` for sweeps.
    pub axis: String,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            t: 1.5,
            s: -0.5,
            theta: 3,
            p: 0.25,
            rounds: 50,
            epsilon: 0.25,
            mu_e: 0.0,
            beta: 0.1,
            pop_size: 100,
            resolution: 21,
            steps: 21,
            quantity: "delta".into(),
            axis: "epsilon".into(),
        }
    }
}

impl DemoParams {
    fn model(&self) -> Result<ModelParams, String> {
        Ok(ModelParams {
            trust: TrustParams::new(self.theta, self.p).map_err(err)?,
            interaction: InteractionParams::new(self.rounds, self.epsilon, self.mu_e)
                .map_err(err)?,
            evolution: EvolutionParams::new(self.pop_size, self.beta).map_err(err)?,
        })
    }

    fn describe(&self) -> String {
        format!(
            "theta={} p={} rounds={} epsilon={} mu_e={} beta={} N={}",
            self.theta, self.p, self.rounds, self.epsilon, self.mu_e, self.beta, self.pop_size
        )
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse(json: &str) -> Result<DemoParams, String> {
    if json.trim().is_empty() {
        return Ok(DemoParams::default());
    }
    serde_json::from_str(json).map_err(err)
}

fn column(quantity: &str) -> Result<String, String> {
    let (small, big) = (pool_label(&three_pool()), pool_label(&five_pool()));
    match quantity {
        "delta" => Ok(format!("delta.{big}-{small}")),
        "coop" => Ok(format!("{big}.coop")),
        "baseline" => Ok(format!("{small}.coop")),
        q if q.starts_with("sigma.") => Ok(format!("{big}.{q}")),
        q => Err(format!(
            "unknown quantity '{q}' (delta, coop, baseline or sigma.<strategy>)"
        )),
    }
}

pub fn grid_svg(json: &str) -> Result<String, String> {
    let p = parse(json)?;
    if !(2..=41).contains(&p.resolution) {
        return Err(format!(
            "resolution must lie in 2..=41 (got {})",
            p.resolution
        ));
    }
    let spec = GridSpec::full_plane(p.resolution, p.model()?, vec![three_pool(), five_pool()]);
    let table = sweep_table(&run_grid(&spec).map_err(err)?);
    heatmap_svg(&table, &column(&p.quantity)?, &p.describe()).map_err(err)
}

pub fn sweep_svg(json: &str) -> Result<String, String> {
    let p = parse(json)?;
    if !(2..=101).contains(&p.steps) {
        return Err(format!("steps must lie in 2..=101 (got {})", p.steps));
    }
    let g = GameParams::new(p.t, p.s).map_err(err)?;
    let pools = vec![three_pool(), five_pool()];
    let result = match p.axis.as_str() {
        "epsilon" => sweep_epsilon(&g, &p.model()?, &pools, &linspace(0.0, 0.5, p.steps)),
        "mu_e" => sweep_error(&g, &p.model()?, &pools, &linspace(0.0, 0.1, p.steps)),
        a => return Err(format!("unknown axis '{a}' (epsilon or mu_e)")),
    }
    .map_err(err)?;
    let table = sweep_table(&result);
    let (with, without) = (column("coop")?, column("baseline")?);
    let title = format!("cooperation vs {} at T={} S={}", p.axis, p.t, p.s);
    let plot = LinePlot {
        title: &title,
        x: &p.axis,
        series: vec![&with, &without],
        shade: Some((&with, &without)),
    };
    lines_svg(&table, &plot, &p.describe()).map_err(err)
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub class: String,
    pub strategies: Vec<String>,
    /// Row player's average payoff per round against each column.
    pub payoffs: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub coop: f64,
    pub baseline_coop: f64,
}

pub fn point_report(json: &str) -> Result<PointReport, String> {
    let p = parse(json)?;
    let g = GameParams::new(p.t, p.s).map_err(err)?;
    let model = p.model()?;
    let pool = five_pool();
    let table = ProfileTable::build(&pool, &model.trust, &model.interaction).map_err(err)?;
    let pm = table.matrix(&g, p.epsilon);
    let full = evaluate_pool_with(&table, &pool, &g, p.epsilon, &model.evolution).map_err(err)?;
    let base =
        evaluate_pool_with(&table, &three_pool(), &g, p.epsilon, &model.evolution).map_err(err)?;
    Ok(PointReport {
        class: g.class().label().to_string(),
        strategies: pool.iter().map(|s| s.to_string()).collect(),
        payoffs: pm.rows().map(<[f64]>::to_vec).collect(),
        sigma: full.sigma.weights,
        coop: full.coop_frequency,
        baseline_coop: base.coop_frequency,
    })
}

/// SVG heatmap over the S-T plane.
#[wasm_bindgen(js_name = gridSvg)]
pub fn grid_svg_js(params: &str) -> Result<String, JsError> {
    grid_svg(params).map_err(|e| JsError::new(&e))
}

/// SVG line plot of cooperation with and without trust-based strategies.
#[wasm_bindgen(js_name = sweepSvg)]
pub fn sweep_svg_js(params: &str) -> Result<String, JsError> {
    sweep_svg(params).map_err(|e| JsError::new(&e))
}

/// JSON payoff matrix, stationary weights and cooperation at one game.
#[wasm_bindgen(js_name = pointReport)]
pub fn point_report_js(params: &str) -> Result<String, JsError> {
    point_report(params)
        .and_then(|r| serde_json::to_string(&r).map_err(err))
        .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_uses_defaults() {
        let r = point_report("").unwrap();
        assert_eq!(r.class, "PD");
        assert_eq!(r.strategies, ["AllC", "AllD", "TFT", "TUC", "TUD"]);
        assert!((r.sigma.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.coop > r.baseline_coop);
        // AllD against AllC earns T
        assert!((r.payoffs[1][0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn grid_renders_requested_quantity() {
        let svg = grid_svg(r#"{"resolution": 3, "quantity": "sigma.TUC"}"#).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("sigma.TUC"));
        assert!(grid_svg(r#"{"resolution": 3, "quantity": "bogus"}"#).is_err());
        assert!(grid_svg(r#"{"resolution": 500}"#).is_err());
    }

    #[test]
    fn sweeps_cover_both_axes() {
        for axis in ["epsilon", "mu_e"] {
            let svg = sweep_svg(&format!(r#"{{"axis": "{axis}", "steps": 4, "S": 0.5}}"#)).unwrap();
            assert!(svg.contains("<polyline"));
        }
        assert!(sweep_svg(r#"{"axis": "beta"}"#).is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(point_report(r#"{"T": 5}"#).is_err());
        assert!(point_report(r#"{"theta": 0}"#).is_err());
        assert!(point_report(r#"{"temptation": 1}"#).is_err());
        assert!(point_report("not json").is_err());
    }
}
