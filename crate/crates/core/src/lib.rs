//! Discovery of quantum error-correcting stabilizer codes and their
//! encoding circuits with reinforcement learning.
//!
//! The crate couples a phase-free binary-symplectic Clifford simulator with
//! a Knill–Laflamme-based reward and a from-scratch PPO trainer. A trained
//! agent emits encoding circuits for a chosen gate set, connectivity and
//! noise channel; the analysis layer classifies the resulting codes by
//! their quantum weight enumerators and evaluates effective distance and
//! exact failure probability.
//!
//! Layering, bottom up:
//! - [`pauli`], [`gate`], [`tableau`]: the GF(2) simulator kernel.
//! - [`noise`], [`errors`]: biased depolarizing channels and target error
//!   sets.
//! - [`kl`]: batched Knill–Laflamme checks and the reward.
//! - [`gateset`], [`circuit`], [`env`]: action spaces, circuit files and
//!   the RL environment (fixed-target, noise-aware meta, CSS modes).
//! - [`ppo`]: actor-critic training with clipped surrogate updates.
//! - [`analysis`]: weight enumerators, family classification, distance and
//!   failure probability.
//! - [`reference`]: naive brute-force oracles the fast paths are verified
//!   against.

pub mod analysis;
pub mod circuit;
pub mod config;
pub mod env;
pub mod error;
pub mod errors;
pub mod gate;
pub mod gateset;
mod gf2;
pub mod kl;
pub mod noise;
pub mod pauli;
pub mod ppo;
pub mod reference;
pub mod tableau;

#[cfg(test)]
pub(crate) mod testutil;

pub use circuit::Circuit;
pub use env::{EnvBatch, EnvSpec, Episode, EpisodeMode, Observation};
pub use error::{Error, Result};
pub use errors::{ErrorSet, ErrorSetMode};
pub use gate::{GateAction, GateKind, SymplecticMetric};
pub use gateset::{Connectivity, GateSetSpec};
pub use kl::{kl_check, kl_check_batched, reward, DegeneracyCheck, KlReport};
pub use noise::{effective_weight, solve_px, NoiseModel};
pub use pauli::PauliString;
pub use tableau::{apply_gate_batched, Tableau};
