//! Simulation and analysis of ground-Rydberg coherence in neutral-atom qubits
//! and its effect on the π-gap-π Rydberg-blockade C_Z gate.
//!
//! Modules, bottom up:
//! - [`engine`]: dense state-vector / Lindblad propagation for d ≤ 16.
//! - [`atoms`]: builders turning physical parameters into Hamiltonians.
//! - [`noise`]: quasi-static shot noise and seeded ensemble averaging.
//! - [`experiments`]: the canned pulse-sequence experiments.
//! - [`analysis`]: curve fitting and closed-form coherence algebra.
//!
//! All frequencies are angular (rad/s) and all times in seconds internally.

pub mod analysis;
pub mod atoms;
pub mod constants;
pub mod engine;
mod error;
pub mod experiments;
pub mod noise;
pub mod units;

pub use error::{Error, Result};
