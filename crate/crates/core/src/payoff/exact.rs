//! Exact forward propagation of the joint (state A, state B) distribution.
//!
//! Each round: both machines read their directive, performed actions flip
//! independently with probability `mu_e`, each side checks with its own
//! probability and observes the partner's performed action of that round,
//! outcome counts accumulate, and the distribution moves to the next states.

use std::collections::{BTreeMap, BTreeSet};

use crate::game::{Action, GameParams};
use crate::strategy::{
    advance, check_is_charged, directive, enumerate_states, initial_state, InteractionParams,
    MachineState, Strategy, TrustParams,
};

use super::{PairEngineResult, PairProfile};

struct Transitions {
    states: Vec<MachineState>,
    initial: usize,
    intended: Vec<Action>,
    check: Vec<f64>,
    // Successor when not checking / when checking and seeing C or D.
    // `None` only for states that can act solely in the final round.
    stay: Vec<Option<usize>>,
    saw_c: Vec<Option<usize>>,
    saw_d: Vec<Option<usize>>,
    charged_c: Vec<bool>,
    charged_d: Vec<bool>,
}

impl Transitions {
    fn build(strategy: Strategy, tp: &TrustParams, ip: &InteractionParams) -> Self {
        let states: Vec<MachineState> = enumerate_states(strategy, tp, ip).into_iter().collect();
        let index: BTreeMap<MachineState, usize> =
            states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let lookup = |s: MachineState| index.get(&s).copied();
        let n = states.len();
        let mut t = Transitions {
            initial: index[&initial_state(strategy)],
            intended: Vec::with_capacity(n),
            check: Vec::with_capacity(n),
            stay: Vec::with_capacity(n),
            saw_c: Vec::with_capacity(n),
            saw_d: Vec::with_capacity(n),
            charged_c: Vec::with_capacity(n),
            charged_d: Vec::with_capacity(n),
            states: Vec::new(),
        };
        for s in &states {
            let d = directive(s, tp);
            t.intended.push(d.intended_action);
            t.check.push(d.check_probability);
            t.stay.push(if d.check_probability < 1.0 {
                lookup(*s)
            } else {
                None
            });
            let on = |seen: Action| {
                if d.check_probability > 0.0 {
                    advance(s, tp, ip.rounds, true, Some(seen))
                        .ok()
                        .and_then(lookup)
                } else {
                    None
                }
            };
            t.saw_c.push(on(Action::C));
            t.saw_d.push(on(Action::D));
            t.charged_c.push(check_is_charged(s, Action::C));
            t.charged_d.push(check_is_charged(s, Action::D));
        }
        t.states = states;
        t
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    /// `(probability, successor, charged)` branches given the partner's action.
    fn branches(&self, i: usize, partner: Action) -> [(f64, Option<usize>, bool); 2] {
        let c = self.check[i];
        let (seen, charged) = match partner {
            Action::C => (self.saw_c[i], self.charged_c[i]),
            Action::D => (self.saw_d[i], self.charged_d[i]),
        };
        [(1.0 - c, self.stay[i], false), (c, seen, charged)]
    }
}

/// Full output of one exact propagation.
#[derive(Debug, Clone)]
pub struct ExactRun {
    pub profile: PairProfile,
    /// Total probability mass at the start of each round.
    pub mass_per_round: Vec<f64>,
    /// Machine states of A and B that carry positive mass in some round.
    pub support_a: BTreeSet<MachineState>,
    pub support_b: BTreeSet<MachineState>,
}

pub fn exact_run(a: Strategy, b: Strategy, tp: &TrustParams, ip: &InteractionParams) -> ExactRun {
    let ta = Transitions::build(a, tp, ip);
    let tb = Transitions::build(b, tp, ip);
    let (na, nb) = (ta.len(), tb.len());
    let mu = ip.mu_e;
    let mut dist = vec![0.0f64; na * nb];
    let mut next = vec![0.0f64; na * nb];
    dist[ta.initial * nb + tb.initial] = 1.0;

    let mut prof = PairProfile {
        rounds: ip.rounds,
        ..PairProfile::default()
    };
    let mut mass_per_round = Vec::with_capacity(ip.rounds as usize);
    let mut seen_a = vec![false; na];
    let mut seen_b = vec![false; nb];

    for round in 0..ip.rounds {
        let last = round + 1 == ip.rounds;
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut mass = 0.0;
        for ia in 0..na {
            for ib in 0..nb {
                let m = dist[ia * nb + ib];
                if m == 0.0 {
                    continue;
                }
                mass += m;
                seen_a[ia] = true;
                seen_b[ib] = true;
                for (act_a, wa) in performed(ta.intended[ia], mu) {
                    for (act_b, wb) in performed(tb.intended[ib], mu) {
                        let w = m * wa * wb;
                        if w == 0.0 {
                            continue;
                        }
                        match (act_a, act_b) {
                            (Action::C, Action::C) => prof.cc += w,
                            (Action::C, Action::D) => prof.cd += w,
                            (Action::D, Action::C) => prof.dc += w,
                            (Action::D, Action::D) => prof.dd += w,
                        }
                        let br_a = ta.branches(ia, act_b);
                        let br_b = tb.branches(ib, act_a);
                        for &(pa, na_next, charged_a) in &br_a {
                            if pa == 0.0 {
                                continue;
                            }
                            if charged_a {
                                prof.checks_a += w * pa;
                            }
                            for &(pb, nb_next, _) in &br_b {
                                if pb == 0.0 {
                                    continue;
                                }
                                if !last {
                                    let ja = na_next.expect("successor of a pre-final state");
                                    let jb = nb_next.expect("successor of a pre-final state");
                                    next[ja * nb + jb] += w * pa * pb;
                                }
                            }
                        }
                        for &(pb, _, charged_b) in &br_b {
                            if charged_b {
                                prof.checks_b += w * pb;
                            }
                        }
                    }
                }
            }
        }
        mass_per_round.push(mass);
        if !last {
            std::mem::swap(&mut dist, &mut next);
        }
    }

    let collect = |t: &Transitions, seen: &[bool]| {
        t.states
            .iter()
            .zip(seen)
            .filter(|(_, &s)| s)
            .map(|(s, _)| *s)
            .collect()
    };
    ExactRun {
        profile: prof,
        mass_per_round,
        support_a: collect(&ta, &seen_a),
        support_b: collect(&tb, &seen_b),
    }
}

fn performed(intended: Action, mu: f64) -> [(Action, f64); 2] {
    [(intended, 1.0 - mu), (intended.flipped(), mu)]
}

pub fn exact_pair_profile(
    a: Strategy,
    b: Strategy,
    tp: &TrustParams,
    ip: &InteractionParams,
) -> PairProfile {
    exact_run(a, b, tp, ip).profile
}

pub fn exact_pair_payoff(
    a: Strategy,
    b: Strategy,
    g: &GameParams,
    tp: &TrustParams,
    ip: &InteractionParams,
) -> PairEngineResult {
    exact_pair_profile(a, b, tp, ip).evaluate(g, ip.epsilon)
}
