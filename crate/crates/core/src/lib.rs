//! Pairwise entanglement dynamics of two isolated Jaynes-Cummings sites.
//!
//! Each site holds a two-level atom coupled to a single cavity mode. The
//! crate evolves two families of initially atom-entangled states, computes
//! the concurrence of all six atom/cavity pairs and locates the intervals
//! where a pair's concurrence vanishes.

pub mod cli;
pub mod closedform;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod esd;
pub mod jcmodel;
pub mod qla;

pub use error::{Error, Result};
