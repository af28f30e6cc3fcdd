pub mod equilibria;
pub mod error;
pub mod gillespie;
pub mod harness;
pub mod netgen;
pub mod pairwise;
pub mod rng;
pub mod thresholds;

pub use error::{Error, Result};
