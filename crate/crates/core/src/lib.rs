//! Deterministic generation of atomic EPR pairs in a lossy cavity:
//! closed-form solution of the dispersive two-atom master equation,
//! numerical oracles, entanglement and teleportation metrics.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod qmat;
pub mod verify;

pub use error::{Error, Result};
