//! Exact noisy simulation of qubit state transfer along a linear chain.
//!
//! Four transfer schemes (SWAP chain, repeated teleportation, GHZ-assisted
//! and cluster-state transfer) are built as circuits, evaluated under
//! depolarizing gate noise and biased readout error by an exact
//! density-matrix engine or a trajectory sampler, and compared against
//! closed-form three-qubit series. Mitigation combines gate-folding
//! extrapolation with readout-response inversion; sweeps emit CSV surfaces.

pub mod channels;
pub mod checks;
pub mod circuit;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod mitigation;
pub mod oracle;
pub mod sweep;

pub use error::{Error, Result};
