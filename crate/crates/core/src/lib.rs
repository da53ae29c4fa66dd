//! Compressive-sensing democracy laboratory.
//!
//! Random measurement ensembles, exhaustive restricted-isometry oracles for
//! desk-scale matrices, Monte Carlo checks of the concentration bounds behind
//! them, sparse recovery solvers, and the measurement-dropping experiments
//! (random, democratic and adversarial deletion).

pub mod concentration;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matrices;
pub mod recovery;
pub mod riplab;
pub mod seed;

pub use error::{LabError, Result};
