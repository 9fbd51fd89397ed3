//! Multi-norms on finite-dimensional sequence spaces `ℓ^r_m`.
//!
//! The crate computes weak p-summing norms, (p,q)-multi-norms, standard
//! t-multi-norms, Hilbert multi-norms and growth constants by certified
//! optimization, and decides equivalence questions symbolically.

pub mod classify;
pub mod cli;
pub mod error;
mod hilbert_dual;
pub mod multinorms;
pub mod optkernel;
pub mod spaces;
pub mod torus_geometry;
pub mod weak_summing;

pub use error::{Error, Result};
pub use spaces::C64;
