//! Simulation of discord generation between two qubits under noisy channels:
//! state algebra, Kraus channels, correlation quantifiers, simulated
//! tomography, and the scenario runners behind the `qdiscord` CLI.

pub mod channels;
pub mod config;
pub mod correlations;
pub mod densop;
pub mod error;
pub mod random;
pub mod report;
pub mod scenarios;
pub mod tomography;

pub use error::{Error, Result};
