use crate::error::{Error, Result};
use crate::game::GameParams;
use crate::strategy::{Strategy, TrustParams};

use super::PayoffMatrix;

/// Closed-form `pi(row, col)` without action errors.
pub fn closed_form_entry(
    row: Strategy,
    col: Strategy,
    g: &GameParams,
    tp: &TrustParams,
    rounds: u32,
    epsilon: f64,
) -> f64 {
    use Strategy::*;
    let (t, s) = (g.t(), g.s());
    let r = rounds as f64;
    let theta = tp.theta as f64;
    let eps = epsilon;
    let trusted_checks = 1.0 - theta * eps / r - tp.p * (r - theta) * eps / r;
    match (row, col) {
        (AllC, AllC) | (AllC, Tft) | (AllC, Tuc) => 1.0,
        (AllC, AllD) => s,
        (AllC, Tud) => (theta + (r - theta) * s) / r,
        (AllD, AllC) => t,
        (AllD, AllD) => 0.0,
        (AllD, Tft) | (AllD, Tuc) | (AllD, Tud) => t / r,
        (Tft, AllC) | (Tft, Tft) | (Tft, Tuc) => 1.0 - eps,
        (Tft, AllD) | (Tuc, AllD) | (Tud, AllD) => s / r - eps,
        (Tft, Tud) => (theta + s) / r - eps,
        (Tuc, AllC) | (Tuc, Tft) | (Tuc, Tuc) => trusted_checks,
        (Tuc, Tud) => {
            let (survive, reverted_rounds) = exploitation_sums(tp.p, rounds - tp.theta);
            theta * (1.0 - eps) / r + (s * survive - eps * reverted_rounds) / r
        }
        (Tud, AllC) => (theta + (r - theta) * t - theta * eps) / r,
        (Tud, Tft) => (theta + t - theta * eps) / r,
        (Tud, Tuc) => {
            let (survive, _) = exploitation_sums(tp.p, rounds - tp.theta);
            (theta * (1.0 - eps) + t * survive) / r
        }
        (Tud, Tud) => (theta - theta * eps) / r,
    }
}

/// For `m` post-trust rounds with detection probability `p` per round,
/// returns `(1 - (1-p)^m) / p` and `((1-p)^m + m p - 1) / p`, with their
/// `p -> 0` limits `m` and `0`.
fn exploitation_sums(p: f64, m: u32) -> (f64, f64) {
    let m = m as f64;
    if p == 0.0 {
        return (m, 0.0);
    }
    // 1 - (1-p)^m without cancellation for small p
    let undetected = -(m * (-p).ln_1p()).exp_m1();
    let survive = undetected / p;
    (survive, m - survive)
}

/// The full five-strategy matrix in the order AllC, AllD, TFT, TUC, TUD.
pub fn closed_form_matrix(
    g: &GameParams,
    tp: &TrustParams,
    rounds: u32,
    epsilon: f64,
) -> Result<PayoffMatrix> {
    if rounds <= tp.theta {
        return Err(Error::Parameter(format!(
            "closed form needs rounds > theta (rounds = {rounds}, theta = {})",
            tp.theta
        )));
    }
    let values = Strategy::ALL
        .iter()
        .flat_map(|&a| Strategy::ALL.iter().map(move |&b| (a, b)))
        .map(|(a, b)| closed_form_entry(a, b, g, tp, rounds, epsilon))
        .collect();
    PayoffMatrix::new(Strategy::ALL.to_vec(), values)
}
