//! Strategy frequencies and the population's frequency of cooperation.
//!
//! In the small-mutation limit the population is almost always monomorphic,
//! so cooperation is the stationary-weighted self-play cooperation of each
//! monomorphic state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{stationary_distribution, EvolutionParams, StationaryDistribution};
use crate::game::GameParams;
use crate::payoff::{check_distinct, exact_pair_payoff, ProfileTable};
use crate::strategy::{InteractionParams, Strategy, TrustParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolResult {
    pub pool: Vec<Strategy>,
    pub sigma: StationaryDistribution,
    pub coop_by_state: Vec<f64>,
    pub coop_frequency: f64,
}

impl PoolResult {
    /// Cooperation contributed by the monomorphic `strategy` state,
    /// `sigma(strategy) * coop(strategy)`; zero if absent from the pool.
    pub fn attributed_cooperation(&self, strategy: Strategy) -> f64 {
        self.pool
            .iter()
            .position(|&s| s == strategy)
            .map_or(0.0, |i| self.sigma.weights[i] * self.coop_by_state[i])
    }
}

pub fn self_play_cooperation(
    strategy: Strategy,
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
) -> f64 {
    exact_pair_payoff(strategy, strategy, g, tp, ip).coop_freq_a
}

pub fn evaluate_pool(
    pool: &[Strategy],
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
    ep: &EvolutionParams,
) -> Result<PoolResult> {
    check_pool(pool)?;
    let table = ProfileTable::build(pool, tp, ip)?;
    evaluate_pool_with(&table, pool, g, ip.epsilon, ep)
}

/// Like [`evaluate_pool`] but reads pair profiles from a prebuilt table,
/// which may cover a superset of `pool`.
pub fn evaluate_pool_with(
    table: &ProfileTable,
    pool: &[Strategy],
    g: &GameParams,
    epsilon: f64,
    ep: &EvolutionParams,
) -> Result<PoolResult> {
    check_pool(pool)?;
    let sub = table.subset(pool)?;
    let pm = sub.matrix(g, epsilon);
    let sigma = stationary_distribution(&pm, ep)?;
    let coop_by_state: Vec<f64> = pool
        .iter()
        .map(|&s| sub.self_play_cooperation(s).expect("strategy in table"))
        .collect();
    let coop_frequency = sigma
        .weights
        .iter()
        .zip(&coop_by_state)
        .map(|(w, c)| w * c)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(PoolResult {
        pool: pool.to_vec(),
        sigma,
        coop_by_state,
        coop_frequency,
    })
}

pub fn cooperation_delta(
    pool_with: &[Strategy],
    pool_without: &[Strategy],
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
    ep: &EvolutionParams,
) -> Result<f64> {
    check_subset(pool_with, pool_without)?;
    let table = ProfileTable::build(pool_with, tp, ip)?;
    let with = evaluate_pool_with(&table, pool_with, g, ip.epsilon, ep)?;
    let without = evaluate_pool_with(&table, pool_without, g, ip.epsilon, ep)?;
    Ok(with.coop_frequency - without.coop_frequency)
}

pub(crate) fn check_pool(pool: &[Strategy]) -> Result<()> {
    if pool.len() < 2 {
        return Err(Error::Parameter(format!(
            "a pool needs at least two strategies (got {})",
            pool.len()
        )));
    }
    check_distinct(pool)
}

pub(crate) fn check_subset(with: &[Strategy], without: &[Strategy]) -> Result<()> {
    match without.iter().find(|s| !with.contains(s)) {
        Some(s) => Err(Error::Parameter(format!(
            "{s} is in the baseline pool but not in the extended pool"
        ))),
        None => Ok(()),
    }
}
