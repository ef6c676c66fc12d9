//! Sweep orchestration over the game plane, the opportunity cost and the
//! error rate. Cells are independent and evaluated in parallel; results are
//! always assembled in grid order.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::evolution::EvolutionParams;
use crate::game::{GameClass, GameParams};
use crate::observables::{check_pool, check_subset, evaluate_pool_with, PoolResult};
use crate::payoff::ProfileTable;
use crate::strategy::{InteractionParams, Strategy, TrustParams};

/// Everything except the swept axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub trust: TrustParams,
    pub interaction: InteractionParams,
    pub evolution: EvolutionParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GamePoint {
    pub name: &'static str,
    pub t: f64,
    pub s: f64,
}

pub const PD_POINT: GamePoint = GamePoint {
    name: "PD",
    t: 1.5,
    s: -0.5,
};
pub const SD_POINT: GamePoint = GamePoint {
    name: "SD",
    t: 1.5,
    s: 0.5,
};
pub const SH_POINT: GamePoint = GamePoint {
    name: "SH",
    t: 0.5,
    s: -0.5,
};
pub const REPRESENTATIVE_POINTS: [GamePoint; 3] = [PD_POINT, SD_POINT, SH_POINT];

impl GamePoint {
    pub fn game(&self) -> GameParams {
        GameParams::new(self.t, self.s).expect("representative points are in range")
    }
}

pub fn pool_label(pool: &[Strategy]) -> String {
    pool.iter().map(|s| s.name()).collect::<Vec<_>>().join("+")
}

pub fn two_pool() -> Vec<Strategy> {
    vec![Strategy::AllC, Strategy::AllD]
}

pub fn three_pool() -> Vec<Strategy> {
    vec![Strategy::AllC, Strategy::AllD, Strategy::Tft]
}

pub fn five_pool() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

/// Parses `AllC,AllD,TFT;AllC,AllD,TFT,TUC,TUD`.
pub fn parse_pools(text: &str) -> Result<Vec<Vec<Strategy>>> {
    let pools = text
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(str::parse)
                .collect::<Result<Vec<Strategy>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    validate_pools(&pools)?;
    Ok(pools)
}

pub fn validate_pools(pools: &[Vec<Strategy>]) -> Result<()> {
    if pools.is_empty() {
        return Err(Error::Parameter("at least one pool is required".into()));
    }
    pools.iter().try_for_each(|p| check_pool(p))
}

/// `(with, without)` index pairs: each pool against its predecessor when
/// the predecessor is a subset.
pub fn delta_pairs(pools: &[Vec<Strategy>]) -> Vec<(usize, usize)> {
    (1..pools.len())
        .filter(|&i| check_subset(&pools[i], &pools[i - 1]).is_ok())
        .map(|i| (i, i - 1))
        .collect()
}

fn pool_union(pools: &[Vec<Strategy>]) -> Vec<Strategy> {
    let mut all: Vec<Strategy> = Vec::new();
    for s in pools.iter().flatten() {
        if !all.contains(s) {
            all.push(*s);
        }
    }
    all
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub s: f64,
    pub class: GameClass,
    pub params: ModelParams,
    pub pools: Vec<PoolResult>,
    /// One entry per [`SweepResult::deltas`] pair.
    pub deltas: Vec<f64>,
}

impl Record {
    pub fn pool(&self, pool: &[Strategy]) -> Option<&PoolResult> {
        self.pools.iter().find(|r| r.pool == pool)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepKind {
    Point,
    Grid,
    Epsilon,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub params: ModelParams,
    pub pools: Vec<Vec<Strategy>>,
    pub deltas: Vec<(usize, usize)>,
    pub records: Vec<Record>,
}

impl SweepResult {
    pub fn delta_label(&self, k: usize) -> String {
        let (with, without) = self.deltas[k];
        format!(
            "delta.{}-{}",
            pool_label(&self.pools[with]),
            pool_label(&self.pools[without])
        )
    }
}

fn evaluate_record(
    table: &ProfileTable,
    g: &GameParams,
    params: &ModelParams,
    pools: &[Vec<Strategy>],
    deltas: &[(usize, usize)],
) -> Result<Record> {
    let results = pools
        .iter()
        .map(|p| evaluate_pool_with(table, p, g, params.interaction.epsilon, &params.evolution))
        .collect::<Result<Vec<_>>>()?;
    let deltas = deltas
        .iter()
        .map(|&(w, wo)| results[w].coop_frequency - results[wo].coop_frequency)
        .collect();
    Ok(Record {
        t: g.t(),
        s: g.s(),
        class: g.class(),
        params: *params,
        pools: results,
        deltas,
    })
}

/// Every pool at one game.
pub fn run_point(
    g: &GameParams,
    params: &ModelParams,
    pools: &[Vec<Strategy>],
) -> Result<SweepResult> {
    validate_pools(pools)?;
    let deltas = delta_pairs(pools);
    let table = ProfileTable::build(&pool_union(pools), &params.trust, &params.interaction)?;
    let record = evaluate_record(&table, g, params, pools, &deltas)?;
    Ok(SweepResult {
        kind: SweepKind::Point,
        params: *params,
        pools: pools.to_vec(),
        deltas,
        records: vec![record],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_range: (f64, f64),
    pub s_range: (f64, f64),
    pub resolution: usize,
    pub params: ModelParams,
    pub pools: Vec<Vec<Strategy>>,
}

impl GridSpec {
    pub fn full_plane(resolution: usize, params: ModelParams, pools: Vec<Vec<Strategy>>) -> Self {
        GridSpec {
            t_range: (0.0, 2.0),
            s_range: (-1.0, 1.0),
            resolution,
            params,
            pools,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi), min, max) in [
            ("T", self.t_range, 0.0, 2.0),
            ("S", self.s_range, -1.0, 1.0),
        ] {
            check_range(name, lo, min, max)?;
            check_range(name, hi, min, max)?;
            if lo > hi {
                return Err(Error::Parameter(format!("{name} range is reversed")));
            }
        }
        if self.resolution < 2 {
            return Err(Error::Parameter(
                "grid resolution must be at least 2".into(),
            ));
        }
        validate_pools(&self.pools)
    }

    /// Cells in row-major order: S outer (ascending), T inner (ascending).
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let ts = linspace(self.t_range.0, self.t_range.1, self.resolution);
        let ss = linspace(self.s_range.0, self.s_range.1, self.resolution);
        ss.iter()
            .flat_map(|&s| ts.iter().map(move |&t| (t, s)))
            .collect()
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn map_cells<I: Sync, F>(items: &[I], f: F) -> Vec<Result<Record>>
where
    F: Fn(&I) -> Result<Record> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn collect_cells(
    results: Vec<Result<Record>>,
    coords: impl Fn(usize) -> (f64, f64),
) -> Result<Vec<Record>> {
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| {
                let (t, s) = coords(index);
                Error::Cell {
                    index,
                    t,
                    s,
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

pub fn run_grid(spec: &GridSpec) -> Result<SweepResult> {
    spec.validate()?;
    let deltas = delta_pairs(&spec.pools);
    let table = ProfileTable::build(
        &pool_union(&spec.pools),
        &spec.params.trust,
        &spec.params.interaction,
    )?;
    let cells = spec.cells();
    let results = map_cells(&cells, |&(t, s)| {
        let g = GameParams::new(t, s)?;
        evaluate_record(&table, &g, &spec.params, &spec.pools, &deltas)
    });
    let records = collect_cells(results, |i| cells[i])?;
    Ok(SweepResult {
        kind: SweepKind::Grid,
        params: spec.params,
        pools: spec.pools.clone(),
        deltas,
        records,
    })
}

/// Opportunity-cost sweep at one game; the pair profiles are shared.
pub fn sweep_epsilon(
    g: &GameParams,
    params: &ModelParams,
    pools: &[Vec<Strategy>],
    epsilons: &[f64],
) -> Result<SweepResult> {
    validate_pools(pools)?;
    for &e in epsilons {
        check_range("epsilon", e, 0.0, f64::MAX)?;
    }
    let deltas = delta_pairs(pools);
    let table = ProfileTable::build(&pool_union(pools), &params.trust, &params.interaction)?;
    let results = map_cells(epsilons, |&e| {
        let mut p = *params;
        p.interaction.epsilon = e;
        evaluate_record(&table, g, &p, pools, &deltas)
    });
    let records = collect_cells(results, |_| (g.t(), g.s()))?;
    Ok(SweepResult {
        kind: SweepKind::Epsilon,
        params: *params,
        pools: pools.to_vec(),
        deltas,
        records,
    })
}

/// Error-rate sweep at one game; profiles are rebuilt per error rate.
pub fn sweep_error(
    g: &GameParams,
    params: &ModelParams,
    pools: &[Vec<Strategy>],
    error_rates: &[f64],
) -> Result<SweepResult> {
    validate_pools(pools)?;
    let deltas = delta_pairs(pools);
    let union = pool_union(pools);
    let results = map_cells(error_rates, |&mu| {
        let mut p = *params;
        p.interaction = InteractionParams::new(p.interaction.rounds, p.interaction.epsilon, mu)?;
        let table = ProfileTable::build(&union, &p.trust, &p.interaction)?;
        evaluate_record(&table, g, &p, pools, &deltas)
    });
    let records = collect_cells(results, |_| (g.t(), g.s()))?;
    Ok(SweepResult {
        kind: SweepKind::Error,
        params: *params,
        pools: pools.to_vec(),
        deltas,
        records,
    })
}
