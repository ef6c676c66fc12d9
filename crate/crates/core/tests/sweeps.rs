use trustevo::output::{csv_string, sweep_table};
use trustevo::sweep::{
    five_pool, run_grid, run_point, sweep_epsilon, three_pool, two_pool, GridSpec, ModelParams,
    PD_POINT,
};
use trustevo::{EvolutionParams, InteractionParams, Strategy};

fn at_epsilon(eps: f64) -> ModelParams {
    ModelParams {
        interaction: InteractionParams::new(50, eps, 0.0).unwrap(),
        ..ModelParams::default()
    }
}

#[test]
fn tuc_is_among_the_most_common_in_the_pd() {
    let res = run_point(&PD_POINT.game(), &at_epsilon(0.25), &[five_pool()]).unwrap();
    let sigma = &res.records[0].pools[0].sigma;
    let tuc = sigma.weight(Strategy::Tuc).unwrap();
    let above = sigma.weights.iter().filter(|&&w| w > tuc).count();
    assert!(above <= 1, "{:?}", sigma.weights);
}

#[test]
fn opportunity_cost_lowers_tft() {
    let res = sweep_epsilon(
        &PD_POINT.game(),
        &ModelParams::default(),
        &[five_pool()],
        &[0.0, 0.25],
    )
    .unwrap();
    let tft = |k: usize| res.records[k].pools[0].sigma.weight(Strategy::Tft).unwrap();
    assert!(tft(0) > tft(1));
}

#[test]
fn neutral_selection_gives_equal_weights() {
    let mut m = at_epsilon(0.25);
    m.evolution = EvolutionParams::new(100, 0.0).unwrap();
    let res = run_point(&PD_POINT.game(), &m, &[five_pool()]).unwrap();
    for w in &res.records[0].pools[0].sigma.weights {
        assert!((w - 0.2).abs() < 1e-12);
    }
}

#[test]
fn tft_needs_no_cost_in_the_two_pool_baseline() {
    // neither AllC nor AllD checks, so the baseline does not move with epsilon
    let res = sweep_epsilon(
        &PD_POINT.game(),
        &ModelParams::default(),
        &[two_pool(), three_pool()],
        &[0.0, 0.5],
    )
    .unwrap();
    let base = |k: usize| res.records[k].pools[0].coop_frequency;
    assert_eq!(base(0), base(1));
}

#[test]
fn grid_output_is_reproducible() {
    let spec = GridSpec::full_plane(7, at_epsilon(0.25), vec![three_pool(), five_pool()]);
    let a = csv_string(&sweep_table(&run_grid(&spec).unwrap()));
    let b = csv_string(&sweep_table(&run_grid(&spec).unwrap()));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 50);
}

#[test]
fn grid_cells_match_single_point_runs() {
    let spec = GridSpec::full_plane(3, at_epsilon(0.1), vec![three_pool(), five_pool()]);
    let grid = run_grid(&spec).unwrap();
    for rec in &grid.records {
        let g = trustevo::GameParams::new(rec.t, rec.s).unwrap();
        let single = run_point(&g, &spec.params, &spec.pools).unwrap();
        assert_eq!(single.records[0].deltas, rec.deltas);
    }
}
