use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{stage_payoff, Action, GameParams};
use crate::strategy::{
    advance, check_is_charged, directive, initial_state, InteractionParams, Strategy, TrustParams,
};

use super::PairEngineResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: PairEngineResult,
    pub stderr: PairEngineResult,
    pub samples: u64,
}

#[derive(Default)]
struct Moments {
    sum: [f64; 4],
    sum_sq: [f64; 4],
}

/// Plays `n_samples` independent interactions. Deterministic given `seed`.
pub fn mc_pair_payoff(
    a: Strategy,
    b: Strategy,
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
    n_samples: u64,
    seed: u64,
) -> McEstimate {
    let n_samples = n_samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Moments::default();
    let r = ip.rounds as f64;
    for _ in 0..n_samples {
        let x = play_once(a, b, g, tp, ip, &mut rng);
        for (k, v) in x.iter().enumerate() {
            let v = v / r;
            acc.sum[k] += v;
            acc.sum_sq[k] += v * v;
        }
    }
    let n = n_samples as f64;
    let mean: [f64; 4] = std::array::from_fn(|k| acc.sum[k] / n);
    let stderr: [f64; 4] = std::array::from_fn(|k| {
        if n_samples < 2 {
            return 0.0;
        }
        let var = ((acc.sum_sq[k] - n * mean[k] * mean[k]) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    });
    let pack = |v: [f64; 4]| PairEngineResult {
        payoff_a: v[0],
        payoff_b: v[1],
        coop_freq_a: v[2],
        coop_freq_b: v[3],
    };
    McEstimate {
        mean: pack(mean),
        stderr: pack(stderr),
        samples: n_samples,
    }
}

// Returns interaction totals: payoff A, payoff B, cooperations A, cooperations B.
fn play_once(
    a: Strategy,
    b: Strategy,
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
    rng: &mut ChaCha8Rng,
) -> [f64; 4] {
    let mut sa = initial_state(a);
    let mut sb = initial_state(b);
    let mut out = [0.0; 4];
    for _ in 0..ip.rounds {
        let da = directive(&sa, tp);
        let db = directive(&sb, tp);
        let act_a = perform(da.intended_action, ip.mu_e, rng);
        let act_b = perform(db.intended_action, ip.mu_e, rng);
        let check_a = draw(da.check_probability, rng);
        let check_b = draw(db.check_probability, rng);
        out[0] += stage_payoff(act_a, act_b, g);
        out[1] += stage_payoff(act_b, act_a, g);
        if check_a && check_is_charged(&sa, act_b) {
            out[0] -= ip.epsilon;
        }
        if check_b && check_is_charged(&sb, act_a) {
            out[1] -= ip.epsilon;
        }
        out[2] += (act_a == Action::C) as u8 as f64;
        out[3] += (act_b == Action::C) as u8 as f64;
        sa = advance(&sa, tp, ip.rounds, check_a, check_a.then_some(act_b))
            .expect("check drawn from the directive");
        sb = advance(&sb, tp, ip.rounds, check_b, check_b.then_some(act_a))
            .expect("check drawn from the directive");
    }
    out
}

fn perform(intended: Action, mu: f64, rng: &mut ChaCha8Rng) -> Action {
    if rng.gen::<f64>() < mu {
        intended.flipped()
    } else {
        intended
    }
}

fn draw(probability: f64, rng: &mut ChaCha8Rng) -> bool {
    rng.gen::<f64>() < probability
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_game;

    #[test]
    fn degenerate_pair_has_zero_error() {
        let g = make_game(1.5, -0.5).unwrap();
        let tp = TrustParams::default();
        let ip = InteractionParams::new(50, 0.25, 0.0).unwrap();
        let est = mc_pair_payoff(Strategy::AllD, Strategy::AllD, &g, &tp, &ip, 1000, 7);
        assert_eq!(est.mean.payoff_a, 0.0);
        assert_eq!(est.stderr.payoff_a, 0.0);
        assert_eq!(est.mean.coop_freq_b, 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let g = make_game(1.2, 0.3).unwrap();
        let tp = TrustParams::default();
        let ip = InteractionParams::new(50, 0.25, 0.05).unwrap();
        let x = mc_pair_payoff(Strategy::Tuc, Strategy::Tft, &g, &tp, &ip, 2000, 42);
        let y = mc_pair_payoff(Strategy::Tuc, Strategy::Tft, &g, &tp, &ip, 2000, 42);
        assert_eq!(x, y);
        let z = mc_pair_payoff(Strategy::Tuc, Strategy::Tft, &g, &tp, &ip, 2000, 43);
        assert_ne!(x.mean, z.mean);
    }
}
