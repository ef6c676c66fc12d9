//! Agent-based simulation of imitation with mutation at a finite rate.
//!
//! Agents receive expected pair payoffs from the exact engine, so the only
//! randomness is in the evolutionary process itself. Each generation one
//! random agent either mutates to a different strategy or compares itself
//! with a random other agent and imitates it with the Fermi probability.
//! A well-mixed population is fully described by its strategy counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{imitation_probability, EvolutionParams};
use crate::game::GameParams;
use crate::observables::check_pool;
use crate::payoff::ProfileTable;
use crate::strategy::{InteractionParams, Strategy, TrustParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub pool: Vec<Strategy>,
    pub game: GameParams,
    pub trust: TrustParams,
    pub interaction: InteractionParams,
    pub evolution: EvolutionParams,
    pub mutation_rate: f64,
    pub generations: u64,
    pub burn_in: u64,
    pub replicates: u32,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        check_pool(&self.pool)?;
        if !(self.mutation_rate > 0.0 && self.mutation_rate < 1.0) {
            return Err(Error::Parameter(format!(
                "mutation rate must lie in (0, 1) (got {})",
                self.mutation_rate
            )));
        }
        if self.burn_in >= self.generations {
            return Err(Error::Parameter(format!(
                "burn-in ({}) must be shorter than the run ({})",
                self.burn_in, self.generations
            )));
        }
        if self.replicates == 0 {
            return Err(Error::Parameter(
                "at least one replicate is required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub pool: Vec<Strategy>,
    /// Time-averaged strategy frequencies, mean over replicates.
    pub frequencies: Vec<f64>,
    /// Standard error across replicates; NaN with a single replicate.
    pub frequency_stderr: Vec<f64>,
    pub coop_frequency: f64,
    pub coop_stderr: f64,
    pub per_replicate: Vec<Vec<f64>>,
}

struct Replicate {
    frequencies: Vec<f64>,
    coop: f64,
}

pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let table = ProfileTable::build(&cfg.pool, &cfg.trust, &cfg.interaction)?;
    let pm = table.matrix(&cfg.game, cfg.interaction.epsilon);
    let s = cfg.pool.len();
    let payoff: Vec<f64> = pm.rows().flatten().copied().collect();
    let coop: Vec<f64> = cfg
        .pool
        .iter()
        .flat_map(|&a| cfg.pool.iter().map(move |&b| (a, b)))
        .map(|(a, b)| table.profile(a, b).expect("pool pair").coop_freq_a())
        .collect();
    let env = Env {
        s,
        n: cfg.evolution.pop_size,
        beta: cfg.evolution.beta,
        mutation_rate: cfg.mutation_rate,
        payoff,
        coop,
    };

    let run = |rep: u32| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(rep as u64);
        env.run(cfg.generations, cfg.burn_in, &mut rng)
    };
    #[cfg(feature = "parallel")]
    let reps: Vec<Replicate> = {
        use rayon::prelude::*;
        (0..cfg.replicates).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let reps: Vec<Replicate> = (0..cfg.replicates).map(run).collect();

    let (frequencies, frequency_stderr): (Vec<f64>, Vec<f64>) = (0..s)
        .map(|k| mean_and_stderr(reps.iter().map(|r| r.frequencies[k])))
        .unzip();
    let (coop_frequency, coop_stderr) = mean_and_stderr(reps.iter().map(|r| r.coop));
    Ok(SimResult {
        pool: cfg.pool.clone(),
        frequencies,
        frequency_stderr,
        coop_frequency,
        coop_stderr,
        per_replicate: reps.into_iter().map(|r| r.frequencies).collect(),
    })
}

fn mean_and_stderr(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Env {
    s: usize,
    n: u32,
    beta: f64,
    mutation_rate: f64,
    payoff: Vec<f64>,
    coop: Vec<f64>,
}

impl Env {
    fn fitness(&self, counts: &[u32], x: usize) -> f64 {
        let row = &self.payoff[x * self.s..(x + 1) * self.s];
        let total: f64 = counts.iter().zip(row).map(|(&c, &p)| c as f64 * p).sum();
        (total - row[x]) / (self.n - 1) as f64
    }

    fn cooperation(&self, counts: &[u32]) -> f64 {
        let n = self.n as f64;
        let mut total = 0.0;
        for x in 0..self.s {
            if counts[x] == 0 {
                continue;
            }
            let row = &self.coop[x * self.s..(x + 1) * self.s];
            let partners: f64 = counts
                .iter()
                .zip(row)
                .map(|(&c, &p)| c as f64 * p)
                .sum::<f64>()
                - row[x];
            total += counts[x] as f64 * partners / (n - 1.0);
        }
        total / n
    }

    fn pick(counts: &[u32], mut u: u32, exclude: Option<usize>) -> usize {
        for (k, &c) in counts.iter().enumerate() {
            let c = if Some(k) == exclude { c - 1 } else { c };
            if u < c {
                return k;
            }
            u -= c;
        }
        unreachable!("index beyond population")
    }

    fn run(&self, generations: u64, burn_in: u64, rng: &mut ChaCha8Rng) -> Replicate {
        let mut counts = vec![0u32; self.s];
        for _ in 0..self.n {
            counts[rng.gen_range(0..self.s)] += 1;
        }
        let mut fit: Vec<f64> = (0..self.s).map(|x| self.fitness(&counts, x)).collect();
        let mut coop_now = self.cooperation(&counts);
        let mut freq_acc = vec![0.0f64; self.s];
        let mut coop_acc = 0.0;
        let mut dwell: u64 = 0;

        for gen in 0..generations {
            if gen >= burn_in {
                dwell += 1;
            }
            let focal = Self::pick(&counts, rng.gen_range(0..self.n), None);
            let target = if rng.gen::<f64>() < self.mutation_rate {
                let k = rng.gen_range(0..self.s - 1);
                Some(if k >= focal { k + 1 } else { k })
            } else {
                let other = Self::pick(&counts, rng.gen_range(0..self.n - 1), Some(focal));
                let copy = other != focal
                    && rng.gen::<f64>() < imitation_probability(fit[focal], fit[other], self.beta);
                copy.then_some(other)
            };
            if let Some(to) = target {
                // Flush the time spent in the old composition before it changes.
                if dwell > 0 {
                    for k in 0..self.s {
                        freq_acc[k] += dwell as f64 * counts[k] as f64;
                    }
                    coop_acc += dwell as f64 * coop_now;
                    dwell = 0;
                }
                counts[focal] -= 1;
                counts[to] += 1;
                for (x, f) in fit.iter_mut().enumerate() {
                    *f = self.fitness(&counts, x);
                }
                coop_now = self.cooperation(&counts);
            }
        }
        for k in 0..self.s {
            freq_acc[k] += dwell as f64 * counts[k] as f64;
        }
        coop_acc += dwell as f64 * coop_now;
        let steps = (generations - burn_in) as f64;
        Replicate {
            frequencies: freq_acc
                .iter()
                .map(|f| f / (steps * self.n as f64))
                .collect(),
            coop: coop_acc / steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_game;
    use Strategy::*;

    fn config(pool: Vec<Strategy>, beta: f64) -> SimConfig {
        SimConfig {
            pool,
            game: make_game(1.5, -0.5).unwrap(),
            trust: TrustParams::default(),
            interaction: InteractionParams::new(50, 0.0, 0.0).unwrap(),
            evolution: EvolutionParams::new(30, beta).unwrap(),
            mutation_rate: 0.01,
            generations: 20_000,
            burn_in: 1_000,
            replicates: 3,
            seed: 11,
        }
    }

    #[test]
    fn frequencies_sum_to_one_and_repeat() {
        let cfg = config(vec![AllC, AllD, Tft], 0.1);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        for rep in &a.per_replicate {
            assert!((rep.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(a.coop_frequency >= 0.0 && a.coop_frequency <= 1.0);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config(vec![AllC, AllD], 0.1);
        cfg.burn_in = cfg.generations;
        assert!(simulate(&cfg).is_err());
        let mut cfg = config(vec![AllC, AllD], 0.1);
        cfg.mutation_rate = 0.0;
        assert!(simulate(&cfg).is_err());
        let cfg = config(vec![AllC], 0.1);
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn fitness_matches_group_payoffs() {
        let env = Env {
            s: 2,
            n: 10,
            beta: 0.0,
            mutation_rate: 0.1,
            payoff: vec![1.0, -0.5, 1.5, 0.0],
            coop: vec![1.0, 1.0, 0.0, 0.0],
        };
        let counts = [4, 6];
        let (pa, pb) = crate::evolution::group_payoffs(4, 1.0, -0.5, 1.5, 0.0, 10).unwrap();
        assert!((env.fitness(&counts, 0) - pa).abs() < 1e-15);
        assert!((env.fitness(&counts, 1) - pb).abs() < 1e-15);
        assert!((env.cooperation(&counts) - 0.4).abs() < 1e-15);
    }
}
