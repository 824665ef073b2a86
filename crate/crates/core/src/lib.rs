//! Exact success probabilities and minimum-resource search for photon-loss
//! codes whose photons carry several qubits each.

pub mod error;
pub mod evaluator;
pub mod model;
pub mod reed_solomon;
pub mod cli;
pub mod search;

pub use error::{Error, Result};
