//! Split local absorbing boundary (SLAB) solver for 1D and 2D nonlinear
//! Schrödinger equations on truncated domains.

pub mod abc;
pub mod cli;
pub mod grid;
pub mod linsolve;
pub mod metrics;
pub mod slab;
pub mod spectral;
