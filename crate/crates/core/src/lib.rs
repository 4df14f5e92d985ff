//! Static-threshold prophet mechanisms over matroids.

pub mod composition;
pub mod config;
pub mod decomposition;
pub mod delta;
pub mod dist;
pub mod error;
pub mod exante;
pub mod gf;
pub mod graph;
pub mod harness;
pub mod matroid;
pub mod mechanisms;
pub mod orient;
pub mod partition;
pub mod rng;
pub mod set;
pub mod thresholds;

pub use error::Error;
pub use set::ItemSet;
