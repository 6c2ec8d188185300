//! Baseline reducers for head-to-head comparison.

mod annealing;
mod greedy;

pub use annealing::{simulated_annealing, SaError, SaParams, SaRun};
pub use greedy::{greedy_ge, greedy_gre, hgs};
