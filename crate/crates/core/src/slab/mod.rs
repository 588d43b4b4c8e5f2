//! The SLAB time step: adaptive parameter refresh, exact nonlinear phase
//! step on the boundary band, semi-implicit interior rows, assembly, solve
//! and commit.

mod config;
mod sim;
mod step;

use thiserror::Error;

use crate::abc::AbcError;
use crate::grid::GridError;
use crate::linsolve::{SolveError, SolveReport};
use crate::metrics::MetricsError;
use crate::spectral::SpectralError;

pub use crate::linsolve::StepSystem;
pub use config::{
    active_edges, BoundaryConfig, InitialCondition, Nonlinearity, ParamMode, PhysicsSpec, Potential,
    SimConfig,
};
pub use sim::{mass_of, simulate, simulate_partial, steps_to, RunFailure, Simulation, StepDiagnostics};
pub use step::{
    assemble_step, band_ids, boundary_rows, effective_potential, in_band, interior_rows, is_interior,
    nonlinear_phase_step, sample_potential, split_on_band, EdgeProfiles,
};

#[derive(Debug, Error)]
pub enum SlabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Abc(#[from] AbcError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("linear solve failed at step {step}: {source}")]
    Solve { step: usize, source: SolveError },
    #[error("solver did not converge at step {step} ({} iterations, residual {:e})", report.iterations, report.residual_norm)]
    NotConverged { step: usize, report: SolveReport },
    #[error("non-finite values at step {step}")]
    NonFinite { step: usize },
}
