//! Pairwise-comparison (Fermi) dynamics in a finite well-mixed population and
//! the small-mutation Markov chain over monomorphic states.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::PayoffMatrix;
use crate::strategy::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub pop_size: u32,
    pub beta: f64,
}

impl EvolutionParams {
    pub fn new(pop_size: u32, beta: f64) -> Result<Self> {
        if pop_size < 2 {
            return Err(Error::Parameter(format!(
                "population size must be at least 2 (got {pop_size})"
            )));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Parameter(format!(
                "selection intensity must be finite and >= 0 (got {beta})"
            )));
        }
        Ok(EvolutionParams { pop_size, beta })
    }
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams {
            pop_size: 100,
            beta: 0.1,
        }
    }
}

/// Average payoffs of an A and a B agent when `k` agents play A.
pub fn group_payoffs(
    k: u32,
    pi_aa: f64,
    pi_ab: f64,
    pi_ba: f64,
    pi_bb: f64,
    pop_size: u32,
) -> Result<(f64, f64)> {
    if k < 1 || k >= pop_size {
        return Err(Error::Parameter(format!(
            "k = {k} outside 1..={} for N = {pop_size}",
            pop_size.saturating_sub(1)
        )));
    }
    let (k, n) = (k as f64, pop_size as f64);
    let pa = ((k - 1.0) * pi_aa + (n - k) * pi_ab) / (n - 1.0);
    let pb = (k * pi_ba + (n - k - 1.0) * pi_bb) / (n - 1.0);
    Ok((pa, pb))
}

/// Probability that an agent with fitness `f_a` copies one with `f_b`.
pub fn imitation_probability(f_a: f64, f_b: f64, beta: f64) -> f64 {
    logistic(beta * (f_b - f_a))
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Payoffs of the two strategies in a two-strategy population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPayoffs {
    pub aa: f64,
    pub ab: f64,
    pub ba: f64,
    pub bb: f64,
}

impl PairPayoffs {
    /// A is `mutant`, B is `resident`.
    pub fn from_matrix(pm: &PayoffMatrix, mutant: Strategy, resident: Strategy) -> Result<Self> {
        let get = |x, y| {
            pm.entry(x, y).ok_or_else(|| {
                Error::Parameter(format!("pair ({x}, {y}) missing from payoff matrix"))
            })
        };
        Ok(PairPayoffs {
            aa: get(mutant, mutant)?,
            ab: get(mutant, resident)?,
            ba: get(resident, mutant)?,
            bb: get(resident, resident)?,
        })
    }

    fn difference(&self, k: u32, pop_size: u32) -> f64 {
        let (pa, pb) = group_payoffs(k, self.aa, self.ab, self.ba, self.bb, pop_size)
            .expect("k within 1..N-1");
        pa - pb
    }
}

/// `(T+, T-)` for `k` A-agents. Both vanish at the monomorphic states.
pub fn transition_rates(k: u32, payoffs: &PairPayoffs, ep: &EvolutionParams) -> (f64, f64) {
    let n = ep.pop_size;
    if k == 0 || k >= n {
        return (0.0, 0.0);
    }
    let diff = payoffs.difference(k, n);
    let mix = (n - k) as f64 / n as f64 * (k as f64 / n as f64);
    (
        mix * logistic(ep.beta * diff),
        mix * logistic(-ep.beta * diff),
    )
}

/// Probability that a single `mutant` takes over a population of `resident`s.
///
/// The ratio `T-(j) / T+(j)` reduces to `exp(-beta * (Pi_A(j) - Pi_B(j)))`
/// since the demographic factors cancel, so the partial products are summed
/// in log space.
pub fn fixation_probability(
    mutant: Strategy,
    resident: Strategy,
    pm: &PayoffMatrix,
    ep: &EvolutionParams,
) -> Result<f64> {
    let payoffs = PairPayoffs::from_matrix(pm, mutant, resident)?;
    Ok(fixation_from_payoffs(&payoffs, ep))
}

pub fn fixation_from_payoffs(payoffs: &PairPayoffs, ep: &EvolutionParams) -> f64 {
    let n = ep.pop_size;
    // log of prod_{j<=i} T-/T+, for i = 1..N-1, plus the leading 1 as log 0.
    let mut logs = Vec::with_capacity(n as usize);
    logs.push(0.0);
    let mut acc = 0.0;
    for j in 1..n {
        acc -= ep.beta * payoffs.difference(j, n);
        logs.push(acc);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = logs.iter().map(|l| (l - peak).exp()).sum();
    (-peak).exp() / scaled
}

/// Row-stochastic transition matrix over monomorphic states.
pub fn small_mutation_matrix(pm: &PayoffMatrix, ep: &EvolutionParams) -> Result<DMatrix<f64>> {
    let pool = pm.strategies();
    let s = pool.len();
    if s < 2 {
        return Err(Error::Parameter("need at least two strategies".into()));
    }
    let mut m = DMatrix::zeros(s, s);
    for i in 0..s {
        let mut off = 0.0;
        for j in 0..s {
            if i != j {
                let rho = fixation_probability(pool[j], pool[i], pm, ep)?;
                m[(i, j)] = rho / (s - 1) as f64;
                off += m[(i, j)];
            }
        }
        m[(i, i)] = 1.0 - off;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    pub strategies: Vec<Strategy>,
    pub weights: Vec<f64>,
}

impl StationaryDistribution {
    pub fn weight(&self, strategy: Strategy) -> Option<f64> {
        let i = self.strategies.iter().position(|&s| s == strategy)?;
        Some(self.weights[i])
    }
}

pub const STATIONARY_RESIDUAL: f64 = 1e-10;

/// Solves `sigma M = sigma`, `sum(sigma) = 1` directly: the last equation of
/// `(M^T - I) sigma = 0` is replaced by the normalisation row.
pub fn stationary_weights(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let s = m.nrows();
    if s == 0 || m.ncols() != s {
        return Err(Error::Parameter(
            "transition matrix must be square and non-empty".into(),
        ));
    }
    let mut a = m.transpose() - DMatrix::identity(s, s);
    for j in 0..s {
        a[(s - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(s);
    rhs[s - 1] = 1.0;
    let sigma = a.lu().solve(&rhs).ok_or_else(|| Error::Numerical {
        message: format!("singular system for {s}-state chain (reducible?)"),
        residual: f64::INFINITY,
    })?;
    // Round-off can leave entries a few ulps below zero.
    let mut w: Vec<f64> = sigma
        .iter()
        .map(|&x| if x < 0.0 && x > -1e-12 { 0.0 } else { x })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);

    let row = DVector::from_column_slice(&w).transpose();
    let residual = (&row * m - &row).amax();
    if residual > STATIONARY_RESIDUAL || w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Numerical {
            message: format!("stationary solve failed, sigma = {w:?}"),
            residual,
        });
    }
    Ok(w)
}

pub fn stationary_distribution(
    pm: &PayoffMatrix,
    ep: &EvolutionParams,
) -> Result<StationaryDistribution> {
    let m = small_mutation_matrix(pm, ep)?;
    Ok(StationaryDistribution {
        strategies: pm.strategies().to_vec(),
        weights: stationary_weights(&m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Strategy::*;

    fn two_by_two(aa: f64, ab: f64, ba: f64, bb: f64) -> PayoffMatrix {
        PayoffMatrix::new(vec![AllC, AllD], vec![aa, ab, ba, bb]).unwrap()
    }

    #[test]
    fn group_payoff_examples() {
        let (pa, _) = group_payoffs(1, 0.3, 0.7, 0.1, 0.9, 100).unwrap();
        assert_eq!(pa, 0.7);
        let (_, pb) = group_payoffs(99, 0.3, 0.7, 0.1, 0.9, 100).unwrap();
        assert_eq!(pb, 0.1);
        let (pa, pb) = group_payoffs(50, 1.0, 0.0, 0.0, 1.0, 100).unwrap();
        assert!((pa - 49.0 / 99.0).abs() < 1e-15);
        assert!((pb - 49.0 / 99.0).abs() < 1e-15);
        assert!(group_payoffs(0, 0.0, 0.0, 0.0, 0.0, 100).is_err());
        assert!(group_payoffs(100, 0.0, 0.0, 0.0, 0.0, 100).is_err());
    }

    #[test]
    fn fermi_function() {
        assert_eq!(imitation_probability(0.4, 0.4, 3.0), 0.5);
        assert_eq!(imitation_probability(-2.0, 9.0, 0.0), 0.5);
        let p = imitation_probability(0.0, 1e6, 1e3);
        assert!(p.is_finite() && (p - 1.0).abs() < 1e-15);
        let q = imitation_probability(1e6, 0.0, 1e3);
        assert!(q.is_finite() && (0.0..1e-300).contains(&q));
    }

    #[test]
    fn rates() {
        let ep = EvolutionParams::new(100, 0.0).unwrap();
        let pay = PairPayoffs {
            aa: 1.0,
            ab: -0.5,
            ba: 1.5,
            bb: 0.0,
        };
        assert_eq!(transition_rates(0, &pay, &ep), (0.0, 0.0));
        assert_eq!(transition_rates(100, &pay, &ep), (0.0, 0.0));
        let (up, down) = transition_rates(50, &pay, &ep);
        assert!((up - 0.125).abs() < 1e-15 && (down - 0.125).abs() < 1e-15);
        let neutral = PairPayoffs {
            aa: 0.3,
            ab: 0.3,
            ba: 0.3,
            bb: 0.3,
        };
        let ep = EvolutionParams::new(100, 2.0).unwrap();
        let (up, down) = transition_rates(17, &neutral, &ep);
        assert!((up - down).abs() < 1e-15);
    }

    #[test]
    fn neutral_fixation() {
        let pm = two_by_two(1.0, -0.5, 1.5, 0.0);
        let ep = EvolutionParams::new(100, 0.0).unwrap();
        assert!((fixation_probability(AllD, AllC, &pm, &ep).unwrap() - 0.01).abs() < 1e-15);
        let same = two_by_two(0.4, 0.4, 0.4, 0.4);
        let ep = EvolutionParams::new(37, 5.0).unwrap();
        assert!((fixation_probability(AllD, AllC, &same, &ep).unwrap() - 1.0 / 37.0).abs() < 1e-15);
    }

    #[test]
    fn extreme_selection_does_not_overflow() {
        let pm = two_by_two(1.0, -1.0, 2.0, 0.0);
        let ep = EvolutionParams::new(1000, 1e4).unwrap();
        let invade = fixation_probability(AllD, AllC, &pm, &ep).unwrap();
        let fail = fixation_probability(AllC, AllD, &pm, &ep).unwrap();
        assert!(invade.is_finite() && invade > 0.99);
        assert!(fail.is_finite() && (0.0..1e-100).contains(&fail));
    }

    #[test]
    fn chain_shapes() {
        let pm = two_by_two(1.0, 1.0, 1.0, 1.0);
        let ep = EvolutionParams::new(50, 0.3).unwrap();
        let m = small_mutation_matrix(&pm, &ep).unwrap();
        assert!((m[(0, 1)] - m[(1, 0)]).abs() < 1e-15);
        let w = stationary_weights(&m).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-14);

        let single = PayoffMatrix::new(vec![AllC], vec![1.0]).unwrap();
        assert!(small_mutation_matrix(&single, &ep).is_err());
    }

    #[test]
    fn reducible_chain_is_reported() {
        let m = DMatrix::identity(3, 3);
        assert!(matches!(
            stationary_weights(&m),
            Err(Error::Numerical { .. })
        ));
    }
}
