//! Analytic engine for the evolution of trust-based strategies in repeated
//! two-player social dilemmas.
//!
//! Five strategies compete: `AllC`, `AllD`, `TFT`, and the trust-based `TUC`
//! and `TUD`. Checking a partner's action costs an opportunity cost `epsilon`.
//! The trust-based strategies stop checking every round once they have seen
//! enough net cooperation. Pair payoffs are computed in closed form, by exact
//! propagation of the joint machine-state distribution, or by Monte Carlo.
//! Those payoffs feed a finite-population pairwise-comparison process whose
//! small-mutation stationary distribution gives strategy and cooperation
//! frequencies.

pub mod abm;
pub mod error;
pub mod evolution;
pub mod game;
pub mod observables;
pub mod output;
pub mod payoff;
pub mod strategy;
pub mod sweep;

pub use error::{Error, Result};
pub use evolution::{EvolutionParams, StationaryDistribution};
pub use game::{Action, GameClass, GameParams};
pub use observables::PoolResult;
pub use payoff::{PairEngineResult, PairProfile, PayoffMatrix, PayoffMethod, ProfileTable};
pub use strategy::{InteractionParams, MachineState, Phase, RoundDirective, Strategy, TrustParams};
