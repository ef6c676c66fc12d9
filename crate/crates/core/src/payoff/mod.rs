//! Per-interaction average payoffs `pi(X, Y)` for ordered strategy pairs.
//!
//! Three routes: the closed-form matrix (no errors), exact propagation of the
//! joint machine-state distribution (any error rate), and Monte Carlo. The
//! exact engine produces a [`PairProfile`] of expected outcome counts which
//! does not depend on `T`, `S` or `epsilon`, so sweeps over the game plane
//! and the opportunity cost reuse one set of profiles.

mod closed_form;
mod exact;
mod monte_carlo;

pub use closed_form::{closed_form_entry, closed_form_matrix};
pub use exact::{exact_pair_payoff, exact_pair_profile, exact_run, ExactRun};
pub use monte_carlo::{mc_pair_payoff, McEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::strategy::{InteractionParams, Strategy, TrustParams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairEngineResult {
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub coop_freq_a: f64,
    pub coop_freq_b: f64,
}

/// Expected outcome counts over one interaction, from A's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairProfile {
    pub rounds: u32,
    pub cc: f64,
    pub cd: f64,
    pub dc: f64,
    pub dd: f64,
    /// Expected number of checks that A (resp. B) pays for.
    pub checks_a: f64,
    pub checks_b: f64,
}

impl PairProfile {
    pub fn swapped(&self) -> PairProfile {
        PairProfile {
            rounds: self.rounds,
            cc: self.cc,
            cd: self.dc,
            dc: self.cd,
            dd: self.dd,
            checks_a: self.checks_b,
            checks_b: self.checks_a,
        }
    }

    pub fn payoff_a(&self, g: &GameParams, epsilon: f64) -> f64 {
        let total = self.cc * g.r() + self.cd * g.s() + self.dc * g.t() + self.dd * g.p()
            - epsilon * self.checks_a;
        total / self.rounds as f64
    }

    pub fn coop_freq_a(&self) -> f64 {
        (self.cc + self.cd) / self.rounds as f64
    }

    pub fn evaluate(&self, g: &GameParams, epsilon: f64) -> PairEngineResult {
        let other = self.swapped();
        PairEngineResult {
            payoff_a: self.payoff_a(g, epsilon),
            payoff_b: other.payoff_a(g, epsilon),
            coop_freq_a: self.coop_freq_a(),
            coop_freq_b: other.coop_freq_a(),
        }
    }
}

/// Square matrix of `pi(row, column)` over an ordered strategy pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    strategies: Vec<Strategy>,
    values: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(strategies: Vec<Strategy>, values: Vec<f64>) -> Result<Self> {
        let s = strategies.len();
        if values.len() != s * s {
            return Err(Error::Parameter(format!(
                "{} values for a {s}x{s} payoff matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite payoff".into()));
        }
        check_distinct(&strategies)?;
        Ok(PayoffMatrix { strategies, values })
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.strategies.len() + col]
    }

    pub fn index_of(&self, strategy: Strategy) -> Option<usize> {
        self.strategies.iter().position(|&s| s == strategy)
    }

    pub fn entry(&self, row: Strategy, col: Strategy) -> Option<f64> {
        Some(self.get(self.index_of(row)?, self.index_of(col)?))
    }

    /// Restriction to `pool`, in the order given.
    pub fn submatrix(&self, pool: &[Strategy]) -> Result<PayoffMatrix> {
        let idx = pool
            .iter()
            .map(|&s| {
                self.index_of(s)
                    .ok_or_else(|| Error::Parameter(format!("{s} is not in the payoff matrix")))
            })
            .collect::<Result<Vec<_>>>()?;
        let values = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        PayoffMatrix::new(pool.to_vec(), values)
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> PayoffMatrix {
        PayoffMatrix {
            strategies: self.strategies.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.strategies.len().max(1))
    }
}

pub(crate) fn check_distinct(pool: &[Strategy]) -> Result<()> {
    for (i, s) in pool.iter().enumerate() {
        if pool[..i].contains(s) {
            return Err(Error::Parameter(format!("{s} appears twice in the pool")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayoffMethod {
    ClosedForm,
    Exact,
}

/// Exact profiles for every ordered pair of a pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    strategies: Vec<Strategy>,
    profiles: Vec<PairProfile>,
}

impl ProfileTable {
    pub fn build(pool: &[Strategy], tp: &TrustParams, ip: &InteractionParams) -> Result<Self> {
        check_distinct(pool)?;
        let s = pool.len();
        let pairs: Vec<(usize, usize)> = (0..s).flat_map(|i| (i..s).map(move |j| (i, j))).collect();
        let compute = |&(i, j): &(usize, usize)| exact_pair_profile(pool[i], pool[j], tp, ip);
        #[cfg(feature = "parallel")]
        let upper: Vec<PairProfile> = {
            use rayon::prelude::*;
            pairs.par_iter().map(compute).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let upper: Vec<PairProfile> = pairs.iter().map(compute).collect();

        let mut profiles = vec![PairProfile::default(); s * s];
        for (&(i, j), prof) in pairs.iter().zip(upper) {
            profiles[j * s + i] = prof.swapped();
            profiles[i * s + j] = prof;
        }
        Ok(ProfileTable {
            strategies: pool.to_vec(),
            profiles,
        })
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn profile(&self, a: Strategy, b: Strategy) -> Option<&PairProfile> {
        let s = self.strategies.len();
        let i = self.strategies.iter().position(|&x| x == a)?;
        let j = self.strategies.iter().position(|&x| x == b)?;
        Some(&self.profiles[i * s + j])
    }

    pub fn matrix(&self, g: &GameParams, epsilon: f64) -> PayoffMatrix {
        let values = self
            .profiles
            .iter()
            .map(|p| p.payoff_a(g, epsilon))
            .collect();
        PayoffMatrix {
            strategies: self.strategies.clone(),
            values,
        }
    }

    /// Expected fraction of performed cooperative actions in self-play.
    pub fn self_play_cooperation(&self, strategy: Strategy) -> Option<f64> {
        self.profile(strategy, strategy)
            .map(PairProfile::coop_freq_a)
    }

    pub fn subset(&self, pool: &[Strategy]) -> Result<ProfileTable> {
        check_distinct(pool)?;
        let mut profiles = Vec::with_capacity(pool.len() * pool.len());
        for &a in pool {
            for &b in pool {
                let prof = self.profile(a, b).ok_or_else(|| {
                    Error::Parameter(format!("pair ({a}, {b}) is not in the profile table"))
                })?;
                profiles.push(*prof);
            }
        }
        Ok(ProfileTable {
            strategies: pool.to_vec(),
            profiles,
        })
    }
}

pub fn payoff_matrix(
    pool: &[Strategy],
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
    method: PayoffMethod,
) -> Result<PayoffMatrix> {
    match method {
        PayoffMethod::ClosedForm => {
            if ip.mu_e != 0.0 {
                return Err(Error::Method(format!(
                    "closed-form payoffs need mu_e = 0 (got {})",
                    ip.mu_e
                )));
            }
            closed_form_matrix(g, tp, ip.rounds, ip.epsilon)?.submatrix(pool)
        }
        PayoffMethod::Exact => Ok(ProfileTable::build(pool, tp, ip)?.matrix(g, ip.epsilon)),
    }
}
