//! Thermostatted Kac master equation: spectral gaps on Hermite sectors, an
//! exact jump-process simulator, the limiting moment hierarchy, and entropy
//! and chaos checks.

pub mod boltzmann;
pub mod chaos;
pub mod cli;
pub mod combinatorics;
pub mod entropy;
pub mod error;
pub mod generator;
pub mod linalg;
pub mod moments;
pub mod params;
pub mod quadrature;
pub mod simulator;

pub use error::{KacError, Result};
pub use params::Params;
