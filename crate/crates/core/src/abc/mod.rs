//! Absorbing boundary conditions: continuous operators and their discrete rows.

mod operator;
mod rows;

use thiserror::Error;

pub use operator::{
    abc10_operator_1d, abc11_corner_operator, abc11_edge_operator, abc11_operator_1d,
    fj_operator_1d, OpTerm, PdeOperator,
};
pub use rows::{
    abc10_rows_1d, abc11_corner_rows, abc11_edge_row, abc11_edge_rows_2d, abc11_rows_1d,
    corner_point, fj_rows_1d, operator_row_1d, BoundaryRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbcError {
    #[error("invalid boundary configuration: {0}")]
    Config(String),
    #[error("invalid boundary parameter: {0}")]
    Parameter(String),
    #[error("boundary index error: {0}")]
    Index(String),
    #[error("group-velocity condition of order {0} is not supported (1..=3)")]
    UnsupportedOrder(usize),
    #[error("cannot discretize: {0}")]
    Discretization(String),
}

/// Boundary-condition family applied on every artificial boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum AbcFamily {
    /// Padé (1,1) condition with wave-number parameter k0 per side.
    Abc11,
    /// Linear interpolation condition; `None` uses `alpha1 = alpha2 = k0`.
    Abc10 { alphas: Option<(f64, f64)> },
    /// Group-velocity product of order `order`; `None` uses `C_l = 2 k0`.
    Fj { order: usize, velocities: Option<Vec<f64>> },
    /// Homogeneous Dirichlet, `psi = 0` (reference/testing only).
    Dirichlet,
}

impl AbcFamily {
    pub fn name(&self) -> &'static str {
        match self {
            AbcFamily::Abc11 => "abc11",
            AbcFamily::Abc10 { .. } => "abc10",
            AbcFamily::Fj { .. } => "fj",
            AbcFamily::Dirichlet => "dirichlet",
        }
    }

    /// Number of outermost layers whose split values a row reads.
    pub fn band_layers(&self) -> usize {
        match self {
            AbcFamily::Fj { order, velocities } => {
                velocities.as_ref().map_or(*order, |v| v.len()).max(1) + 1
            }
            _ => 2,
        }
    }
}
