//! Strict equilibrium installation by reward design.
//!
//! Given a target joint behavior (a mixed strategy of a normal-form game or a
//! Markov policy of a finite-horizon Markov game), this crate decides whether
//! rewards alone can make the behavior a strict NE, CE or CCE, builds explicit
//! witness rewards, solves cost-optimal reward design as a linear program, and
//! re-checks every design with brute-force deviation oracles that never touch
//! the LP.

pub mod design;
pub mod error;
pub mod game;
pub mod installability;
pub mod lp;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use game::{
    cosine_gap, ActionShape, Concept, Conditional, DeviationClass, JointMixedStrategy,
    MarkovGameSkeleton, MarkovPolicy, NormalFormGame, RewardFunction, RewardTable, ValueTables,
};
