//! Scaled stage game: `R = 1`, `P = 0`, `T` in `[0, 2]`, `S` in `[-1, 1]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    C,
    D,
}

impl Action {
    pub fn flipped(self) -> Action {
        match self {
            Action::C => Action::D,
            Action::D => Action::C,
        }
    }
}

/// Payoffs of the symmetric stage game for the row player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    t: f64,
    s: f64,
}

impl GameParams {
    pub const R: f64 = 1.0;
    pub const P: f64 = 0.0;

    pub fn new(t: f64, s: f64) -> Result<Self> {
        check_range("T", t, 0.0, 2.0)?;
        check_range("S", s, -1.0, 1.0)?;
        Ok(GameParams { t, s })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r(&self) -> f64 {
        Self::R
    }

    pub fn p(&self) -> f64 {
        Self::P
    }

    pub fn class(&self) -> GameClass {
        classify(self)
    }
}

pub fn make_game(t: f64, s: f64) -> Result<GameParams> {
    GameParams::new(t, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameClass {
    /// Prisoner's Dilemma, `T > 1 > 0 > S`.
    PD,
    /// Snowdrift, `T > 1 > S > 0`. The corner `T + S > 2` is folded in so
    /// the whole upper-right quadrant carries one label.
    SD,
    /// Stag Hunt, `1 > T > 0 > S`.
    SH,
    /// `T < 1` and `S > 0`.
    Harmony,
    /// Any point on a separating line.
    Boundary,
}

impl GameClass {
    pub fn label(self) -> &'static str {
        match self {
            GameClass::PD => "PD",
            GameClass::SD => "SD",
            GameClass::SH => "SH",
            GameClass::Harmony => "Harmony",
            GameClass::Boundary => "Boundary",
        }
    }
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify(g: &GameParams) -> GameClass {
    let (t, s) = (g.t, g.s);
    if t > 1.0 && s < 0.0 {
        GameClass::PD
    } else if t > 1.0 && s > 0.0 && t + s != 2.0 {
        GameClass::SD
    } else if t < 1.0 && s < 0.0 {
        GameClass::SH
    } else if t < 1.0 && s > 0.0 {
        GameClass::Harmony
    } else {
        // T = 1, S = 0, or T + S = 2 in the upper-right quadrant.
        GameClass::Boundary
    }
}

pub fn stage_payoff(own: Action, other: Action, g: &GameParams) -> f64 {
    match (own, other) {
        (Action::C, Action::C) => GameParams::R,
        (Action::C, Action::D) => g.s,
        (Action::D, Action::C) => g.t,
        (Action::D, Action::D) => GameParams::P,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_and_bounds() {
        let g = make_game(1.5, -0.5).unwrap();
        assert_eq!((g.t(), g.s(), g.r(), g.p()), (1.5, -0.5, 1.0, 0.0));
        assert!(matches!(
            make_game(2.5, 0.0),
            Err(crate::Error::Bounds { name: "T", .. })
        ));
        assert!(make_game(0.0, -1.0).is_ok());
        assert!(make_game(1.0, 1.01).is_err());
        assert!(make_game(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(make_game(1.5, -0.5).unwrap().class(), GameClass::PD);
        assert_eq!(make_game(0.5, -0.5).unwrap().class(), GameClass::SH);
        assert_eq!(make_game(1.5, 0.3).unwrap().class(), GameClass::SD);
        assert_eq!(make_game(0.5, 0.5).unwrap().class(), GameClass::Harmony);
        assert_eq!(make_game(1.0, 0.0).unwrap().class(), GameClass::Boundary);
        assert_eq!(make_game(1.0, -0.5).unwrap().class(), GameClass::Boundary);
        assert_eq!(make_game(1.5, 0.5).unwrap().class(), GameClass::Boundary);
        assert_eq!(make_game(1.8, 0.5).unwrap().class(), GameClass::SD);
    }

    #[test]
    fn stage_payoffs() {
        let g = make_game(1.5, -0.5).unwrap();
        assert_eq!(stage_payoff(Action::C, Action::D, &g), -0.5);
        assert_eq!(stage_payoff(Action::D, Action::C, &g), 1.5);
        assert_eq!(stage_payoff(Action::D, Action::D, &g), 0.0);
        assert_eq!(stage_payoff(Action::C, Action::C, &g), 1.0);
    }

    proptest! {
        #[test]
        fn open_quadrants_are_never_boundary(t in 0.0f64..2.0, s in -1.0f64..1.0) {
            prop_assume!(t != 1.0 && s != 0.0 && (t + s - 2.0).abs() > 1e-12);
            let g = make_game(t, s).unwrap();
            prop_assert_ne!(g.class(), GameClass::Boundary);
        }

        #[test]
        fn diagonal_payoffs_ignore_t_and_s(t in 0.0f64..=2.0, s in -1.0f64..=1.0) {
            let g = make_game(t, s).unwrap();
            prop_assert_eq!(stage_payoff(Action::C, Action::C, &g), 1.0);
            prop_assert_eq!(stage_payoff(Action::D, Action::D, &g), 0.0);
        }
    }
}
