//! Dense-coding capacity and teleportation fidelity of random multiqubit
//! states, and local two-outcome POVM pre-processing that activates or
//! enhances them.
//!
//! Module map:
//! - [`linalg`]: complex matrices, Hermitian eigensolver, density matrices,
//!   partial trace/transpose, entropies.
//! - [`sampling`]: Haar-random pure states and rank-controlled mixed states.
//! - [`measures`]: capacities, fidelity, CHSH parameter, negativity.
//! - [`families`]: closed-form state families and bound sweeps.
//! - [`preprocess`]: dichotomic POVMs, post-measurement states, merits, optimizer.
//! - [`analytics`]: mean-entropy predictions for random states.
//! - [`experiments`]: batch runners, statistics and output files.
//! - [`cli`]: command-line front end.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod families;
pub mod linalg;
pub mod measures;
pub mod preprocess;
pub mod sampling;

pub use error::{Error, Result};
