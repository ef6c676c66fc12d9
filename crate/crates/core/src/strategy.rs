//! The five strategies as finite stochastic transducers.
//!
//! A machine reads its [`RoundDirective`] (intended action and probability of
//! checking the partner this round) from its state and is advanced with what,
//! if anything, it observed. All randomness (errors, check draws) is supplied
//! by the engines, so the exact and Monte Carlo engines share this definition.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::game::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    AllC,
    AllD,
    Tft,
    Tuc,
    Tud,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::AllC,
        Strategy::AllD,
        Strategy::Tft,
        Strategy::Tuc,
        Strategy::Tud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::AllC => "AllC",
            Strategy::AllD => "AllD",
            Strategy::Tft => "TFT",
            Strategy::Tuc => "TUC",
            Strategy::Tud => "TUD",
        }
    }

    pub fn is_trust_based(self) -> bool {
        matches!(self, Strategy::Tuc | Strategy::Tud)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "allc" => Ok(Strategy::AllC),
            "alld" => Ok(Strategy::AllD),
            "tft" => Ok(Strategy::Tft),
            "tuc" => Ok(Strategy::Tuc),
            "tud" => Ok(Strategy::Tud),
            other => Err(Error::Parameter(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Trust threshold and post-trust check probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustParams {
    pub theta: u32,
    pub p: f64,
}

impl TrustParams {
    pub fn new(theta: u32, p: f64) -> Result<Self> {
        if theta < 1 {
            return Err(Error::Parameter("theta must be at least 1".into()));
        }
        check_range("p", p, 0.0, 1.0)?;
        Ok(TrustParams { theta, p })
    }
}

impl Default for TrustParams {
    fn default() -> Self {
        TrustParams { theta: 3, p: 0.25 }
    }
}

/// Length of an interaction, cost of one check and per-action error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub rounds: u32,
    pub epsilon: f64,
    pub mu_e: f64,
}

impl InteractionParams {
    pub fn new(rounds: u32, epsilon: f64, mu_e: f64) -> Result<Self> {
        if rounds < 1 {
            return Err(Error::Parameter("rounds must be at least 1".into()));
        }
        check_range("epsilon", epsilon, 0.0, f64::MAX)?;
        check_range("mu_e", mu_e, 0.0, 0.5)?;
        Ok(InteractionParams {
            rounds,
            epsilon,
            mu_e,
        })
    }
}

impl Default for InteractionParams {
    fn default() -> Self {
        InteractionParams {
            rounds: 50,
            epsilon: 0.25,
            mu_e: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    Unconditional,
    TftMode,
    PreTrust,
    Trusting,
    Reverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MachineState {
    pub strategy: Strategy,
    pub phase: Phase,
    /// Net observed cooperations. Only moves in `PreTrust`.
    pub counter: i32,
    /// Memory for the reactive rule; `None` before the first observation.
    pub last_observed: Option<Action>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundDirective {
    pub intended_action: Action,
    pub check_probability: f64,
}

pub fn initial_state(strategy: Strategy) -> MachineState {
    let phase = match strategy {
        Strategy::AllC | Strategy::AllD => Phase::Unconditional,
        Strategy::Tft => Phase::TftMode,
        Strategy::Tuc | Strategy::Tud => Phase::PreTrust,
    };
    MachineState {
        strategy,
        phase,
        counter: 0,
        last_observed: None,
    }
}

fn reactive(last: Option<Action>) -> Action {
    match last {
        Some(Action::D) => Action::D,
        _ => Action::C,
    }
}

pub fn directive(state: &MachineState, tp: &TrustParams) -> RoundDirective {
    let (intended_action, check_probability) = match (state.strategy, state.phase) {
        (Strategy::AllC, _) => (Action::C, 0.0),
        (Strategy::AllD, _) => (Action::D, 0.0),
        (Strategy::Tuc, Phase::Trusting) => (Action::C, tp.p),
        (Strategy::Tud, Phase::Trusting) => (Action::D, 0.0),
        _ => (reactive(state.last_observed), 1.0),
    };
    RoundDirective {
        intended_action,
        check_probability,
    }
}

/// Advances `state` after one round. `floor` bounds the pre-trust counter
/// from below; callers pass the number of rounds.
pub fn advance(
    state: &MachineState,
    tp: &TrustParams,
    floor: u32,
    checked: bool,
    observed: Option<Action>,
) -> Result<MachineState> {
    if checked != observed.is_some() {
        return Err(Error::Contract(format!(
            "checked = {checked} but observed = {observed:?}"
        )));
    }
    if checked && directive(state, tp).check_probability == 0.0 {
        return Err(Error::Contract(format!(
            "{} in phase {:?} never checks",
            state.strategy, state.phase
        )));
    }
    let Some(seen) = observed else {
        return Ok(*state);
    };
    let mut next = *state;
    match state.phase {
        Phase::Unconditional => {}
        Phase::TftMode | Phase::Reverted => next.last_observed = Some(seen),
        Phase::PreTrust => {
            next.last_observed = Some(seen);
            next.counter = match seen {
                Action::C => state.counter + 1,
                Action::D => (state.counter - 1).max(-(floor as i32)),
            };
            if next.counter >= tp.theta as i32 {
                next.phase = Phase::Trusting;
                next.counter = tp.theta as i32;
            }
        }
        Phase::Trusting => {
            if state.strategy == Strategy::Tuc && seen == Action::D {
                next.phase = Phase::Reverted;
                next.last_observed = Some(Action::D);
            }
        }
    }
    Ok(next)
}

/// Whether a check made in `state` that saw `observed` is charged the
/// opportunity cost. The check with which a trusting TUC catches a defection
/// is free: that round pays `S`, and only the reverted rounds pay the cost.
pub fn check_is_charged(state: &MachineState, observed: Action) -> bool {
    !(state.strategy == Strategy::Tuc && state.phase == Phase::Trusting && observed == Action::D)
}

/// Every state that can direct one of the `rounds` rounds of an interaction,
/// against any partner and under any error pattern.
pub fn enumerate_states(
    strategy: Strategy,
    tp: &TrustParams,
    ip: &InteractionParams,
) -> BTreeSet<MachineState> {
    let mut seen = BTreeSet::new();
    let start = initial_state(strategy);
    seen.insert(start);
    let mut frontier = vec![start];
    for _ in 1..ip.rounds {
        let mut next_frontier = Vec::new();
        for state in &frontier {
            for next in successors(state, tp, ip.rounds) {
                if seen.insert(next) {
                    next_frontier.push(next);
                }
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    seen
}

pub(crate) fn successors(state: &MachineState, tp: &TrustParams, floor: u32) -> Vec<MachineState> {
    let check = directive(state, tp).check_probability;
    let mut out = Vec::with_capacity(3);
    if check < 1.0 {
        out.push(*state);
    }
    if check > 0.0 {
        for seen in [Action::C, Action::D] {
            out.push(advance(state, tp, floor, true, Some(seen)).expect("consistent input"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};

    fn tp() -> TrustParams {
        TrustParams::new(3, 0.25).unwrap()
    }

    fn feed(state: MachineState, seq: &[Option<Action>]) -> MachineState {
        seq.iter().fold(state, |s, obs| {
            advance(&s, &tp(), 50, obs.is_some(), *obs).unwrap()
        })
    }

    #[test]
    fn initial_states() {
        let tuc = initial_state(Strategy::Tuc);
        assert_eq!(
            (tuc.phase, tuc.counter, tuc.last_observed),
            (Phase::PreTrust, 0, None)
        );
        let tft = initial_state(Strategy::Tft);
        assert_eq!((tft.phase, tft.last_observed), (Phase::TftMode, None));
        assert_eq!(initial_state(Strategy::AllD).phase, Phase::Unconditional);
    }

    #[test]
    fn directives() {
        let trusting = MachineState {
            phase: Phase::Trusting,
            counter: 3,
            ..initial_state(Strategy::Tuc)
        };
        assert_eq!(
            directive(&trusting, &tp()),
            RoundDirective {
                intended_action: Action::C,
                check_probability: 0.25
            }
        );
        let tud = MachineState {
            strategy: Strategy::Tud,
            ..trusting
        };
        assert_eq!(
            directive(&tud, &tp()),
            RoundDirective {
                intended_action: Action::D,
                check_probability: 0.0
            }
        );
        let tft = MachineState {
            last_observed: Some(Action::D),
            ..initial_state(Strategy::Tft)
        };
        assert_eq!(
            directive(&tft, &tp()),
            RoundDirective {
                intended_action: Action::D,
                check_probability: 1.0
            }
        );
        assert_eq!(
            directive(&initial_state(Strategy::AllC), &tp()).check_probability,
            0.0
        );
    }

    #[test]
    fn trust_fires_on_reaching_threshold() {
        let s = MachineState {
            counter: 2,
            ..initial_state(Strategy::Tuc)
        };
        let next = advance(&s, &tp(), 50, true, Some(Action::C)).unwrap();
        assert_eq!(next.phase, Phase::Trusting);

        let after_two = feed(initial_state(Strategy::Tuc), &[Some(Action::C); 2]);
        assert_eq!((after_two.phase, after_two.counter), (Phase::PreTrust, 2));
    }

    #[test]
    fn tuc_reverts_with_defection_memory() {
        let trusting = feed(initial_state(Strategy::Tuc), &[Some(Action::C); 3]);
        assert_eq!(trusting.phase, Phase::Trusting);
        let unchanged = advance(&trusting, &tp(), 50, true, Some(Action::C)).unwrap();
        assert_eq!(unchanged, trusting);
        assert_eq!(
            advance(&trusting, &tp(), 50, false, None).unwrap(),
            trusting
        );
        let reverted = advance(&trusting, &tp(), 50, true, Some(Action::D)).unwrap();
        assert_eq!(
            (reverted.phase, reverted.last_observed),
            (Phase::Reverted, Some(Action::D))
        );
        assert_eq!(directive(&reverted, &tp()).intended_action, Action::D);
        assert!(!check_is_charged(&trusting, Action::D));
        assert!(check_is_charged(&trusting, Action::C));
        assert!(check_is_charged(&reverted, Action::D));
    }

    #[test]
    fn counter_is_signed_and_clamped() {
        let s = feed(
            initial_state(Strategy::Tud),
            &[Some(Action::D), Some(Action::D), Some(Action::C)],
        );
        assert_eq!(s.counter, -1);
        let deep = MachineState {
            counter: -4,
            ..initial_state(Strategy::Tud)
        };
        let clamped = advance(&deep, &tp(), 4, true, Some(Action::D)).unwrap();
        assert_eq!(clamped.counter, -4);
    }

    #[test]
    fn unconditional_ignores_everything() {
        let s = initial_state(Strategy::AllC);
        assert_eq!(advance(&s, &tp(), 50, false, None).unwrap(), s);
    }

    #[test]
    fn inconsistent_inputs_are_rejected() {
        let tft = initial_state(Strategy::Tft);
        assert!(matches!(
            advance(&tft, &tp(), 50, true, None),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            advance(&tft, &tp(), 50, false, Some(Action::C)),
            Err(Error::Contract(_))
        ));
        let alld = initial_state(Strategy::AllD);
        assert!(matches!(
            advance(&alld, &tp(), 50, true, Some(Action::C)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn enumerated_state_counts() {
        let ip = InteractionParams::new(50, 0.25, 0.0).unwrap();
        assert_eq!(enumerate_states(Strategy::AllD, &tp(), &ip).len(), 1);
        assert_eq!(enumerate_states(Strategy::Tft, &tp(), &ip).len(), 3);
        let tuc = enumerate_states(Strategy::Tuc, &tp(), &ip);
        let brute = brute_force_reachable(Strategy::Tuc, 50);
        assert_eq!(tuc, brute);
        let tud = enumerate_states(Strategy::Tud, &tp(), &ip);
        assert_eq!(tud, brute_force_reachable(Strategy::Tud, 50));
        assert!(tud.len() < tuc.len());
    }

    // Independent of enumerate_states: replays every observation history of
    // length up to `rounds - 1` through the machine (pruned on repeats).
    fn brute_force_reachable(strategy: Strategy, rounds: u32) -> BTreeSet<MachineState> {
        let mut all = BTreeSet::new();
        let mut layer: BTreeSet<MachineState> = [initial_state(strategy)].into();
        all.extend(layer.iter().copied());
        for _ in 1..rounds {
            let mut next = BTreeSet::new();
            for s in &layer {
                for obs in [None, Some(Action::C), Some(Action::D)] {
                    if let Ok(n) = advance(s, &tp(), rounds, obs.is_some(), obs) {
                        next.insert(n);
                    }
                }
            }
            all.extend(next.iter().copied());
            layer = next;
        }
        all
    }

    fn any_strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
        prop::sample::select(Strategy::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn absorbing_phases_and_counter_bound(
            strat in any_strategy(),
            obs in prop::collection::vec(prop::option::of(prop::bool::ANY), 0..60)
        ) {
            let tp = tp();
            let mut s = initial_state(strat);
            for o in obs {
                let o = o.map(|c| if c { Action::C } else { Action::D });
                let Ok(n) = advance(&s, &tp, 60, o.is_some(), o) else { continue };
                if s.phase == Phase::Reverted || (s.strategy == Strategy::Tud && s.phase == Phase::Trusting) {
                    prop_assert_eq!(n.phase, s.phase);
                }
                if n.phase == Phase::PreTrust {
                    prop_assert!(n.counter < tp.theta as i32 && n.counter >= -60);
                }
                prop_assert_eq!(directive(&n, &tp), directive(&n, &tp));
                s = n;
            }
        }
    }
}
