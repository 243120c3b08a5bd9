//! Embodied evolution on networks of agents that only exchange genetic
//! material with their neighbors.

pub mod analysis;
pub mod data;
pub mod engine;
pub mod error;
pub mod frame;
pub mod genome;
pub mod problems;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
