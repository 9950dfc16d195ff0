//! Computational laboratory for the averaged, rotation-reduced planar
//! three-body problem: evaluation of the averaged potential and the Euler
//! integral, integration of the reduced two-degrees-of-freedom flow, first
//! return maps with fixed-point and invariant-manifold machinery,
//! quasi-conservation statistics of the Euler integral, and a numerically
//! verified covering-relations apparatus for symbolic dynamics.

pub mod error;
pub mod flow;
pub mod kepler;
pub mod model;
pub mod scenarios;
pub mod sections;

pub use error::{Error, Result};
pub use flow::IntegratorSpec;
