//! Surface-code memory experiments under correlated atom loss, with
//! teleportation-based loss detection and three loss-aware decoders.

pub mod circuit;
pub mod decoder;
pub mod dem;
pub mod error;
pub mod experiment;
pub mod loss_graph;
pub mod matching;
pub mod noise;
pub mod pauli;
pub mod propagate;
pub mod rng;
pub mod sim;
pub mod tableau;

pub use error::{Error, Result};
