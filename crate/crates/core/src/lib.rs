//! Round-accurate Congested Clique simulator with sampling-based
//! connectivity verification and an exact MST pipeline.

pub mod connectivity;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod mst;
pub mod net;
pub mod sampling;

pub use error::{Error, Result};
