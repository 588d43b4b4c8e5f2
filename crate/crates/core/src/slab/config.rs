use num_complex::Complex64;

use crate::abc::AbcFamily;
use crate::grid::{Edge, GridSpec};
use crate::linsolve::KrylovConfig;
use crate::metrics::{bright_soliton, SolitonParams};
use crate::spectral::AdaptiveConfig;

use super::SlabError;

/// Nonlinear coefficient `f(s)` with `s = |psi|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Linear,
    /// `f(s) = g s`.
    Cubic { g: f64 },
}

impl Nonlinearity {
    pub fn eval(self, s: f64) -> f64 {
        match self {
            Nonlinearity::Linear => 0.0,
            Nonlinearity::Cubic { g } => g * s,
        }
    }

    pub fn coupling(self) -> f64 {
        match self {
            Nonlinearity::Linear => 0.0,
            Nonlinearity::Cubic { g } => g,
        }
    }
}

/// External potential `V(x, y)`; time independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Constant(f64),
    /// `amplitude * exp(-((x - x0)^2 + (y - y0)^2) / (2 sigma^2))`; `y0` is
    /// ignored in 1D.
    Gaussian { amplitude: f64, sigma: f64, x0: f64, y0: f64 },
}

impl Potential {
    pub fn eval(&self, x: f64, y: f64, dim: usize) -> f64 {
        match *self {
            Potential::Constant(c) => c,
            Potential::Gaussian { amplitude, sigma, x0, y0 } => {
                let dy = if dim == 2 { y - y0 } else { 0.0 };
                amplitude * (-((x - x0).powi(2) + dy * dy) / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsSpec {
    pub nonlinearity: Nonlinearity,
    pub potential: Potential,
}

impl PhysicsSpec {
    pub fn linear_free() -> Self {
        Self { nonlinearity: Nonlinearity::Linear, potential: Potential::Constant(0.0) }
    }
}

/// Initial data `psi(x, y, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// Superposition of bright solitons of the focusing equation (1D).
    Solitons(Vec<SolitonParams>),
    /// `amplitude * exp(-rate r^2) * exp(i (kx (x - x0) + ky (y - y0)))`.
    Gaussian { amplitude: f64, rate: f64, x0: f64, kx: f64, y0: f64, ky: f64 },
}

impl InitialCondition {
    pub fn sampler(
        &self,
        physics: &PhysicsSpec,
        dim: usize,
    ) -> Result<Box<dyn Fn(f64, f64) -> Complex64 + Send + Sync>, SlabError> {
        match self {
            InitialCondition::Zero => Ok(Box::new(|_, _| Complex64::new(0.0, 0.0))),
            InitialCondition::Solitons(list) => {
                if dim != 1 {
                    return Err(SlabError::Config("soliton initial data is one-dimensional".into()));
                }
                let g = physics.nonlinearity.coupling();
                for s in list {
                    bright_soliton(0.0, 0.0, s, g)?;
                }
                let list = list.clone();
                Ok(Box::new(move |x, _| {
                    list.iter().map(|s| bright_soliton(x, 0.0, s, g).unwrap_or_default()).sum()
                }))
            }
            &InitialCondition::Gaussian { amplitude, rate, x0, kx, y0, ky } => {
                if !(rate > 0.0) {
                    return Err(SlabError::Config(format!("gaussian rate {rate} must be positive")));
                }
                let two_d = dim == 2;
                Ok(Box::new(move |x, y| {
                    let (dy, ky) = if two_d { (y - y0, ky) } else { (0.0, 0.0) };
                    let r2 = (x - x0).powi(2) + dy * dy;
                    Complex64::from_polar(amplitude * (-rate * r2).exp(), kx * (x - x0) + ky * dy)
                }))
            }
        }
    }
}

/// How a side's wave-number parameter is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamMode {
    Fixed(f64),
    Adaptive,
}

/// Boundary family plus per-edge parameter modes, indexed by [`Edge`]
/// (`West`/`East` are left/right in 1D; `South`/`North` are ignored there).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    pub family: AbcFamily,
    pub modes: [ParamMode; 4],
}

impl BoundaryConfig {
    pub fn uniform(family: AbcFamily, mode: ParamMode) -> Self {
        Self { family, modes: [mode; 4] }
    }

    pub fn mode(&self, edge: Edge) -> ParamMode {
        self.modes[edge as usize]
    }

    pub fn set_mode(&mut self, edge: Edge, mode: ParamMode) {
        self.modes[edge as usize] = mode;
    }
}

/// Edges that exist for a grid of the given dimension.
pub fn active_edges(dim: usize) -> &'static [Edge] {
    if dim == 1 {
        &[Edge::West, Edge::East]
    } else {
        &Edge::ALL
    }
}

/// Everything one simulation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub physics: PhysicsSpec,
    pub initial: InitialCondition,
    pub boundary: BoundaryConfig,
    pub adaptive: AdaptiveConfig,
    pub solver: KrylovConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SlabError> {
        let dim = self.grid.dim();
        if !(self.grid.dt > 0.0) || !self.grid.dt.is_finite() {
            return Err(SlabError::Config(format!("dt = {}", self.grid.dt)));
        }
        let layers = self.boundary.family.band_layers();
        if self.grid.nx() < 2 * layers + 1 || (dim == 2 && self.grid.ny() < 2 * layers + 1) {
            return Err(SlabError::Config("grid too small for the boundary band".into()));
        }
        match (&self.boundary.family, dim) {
            (AbcFamily::Abc10 { .. } | AbcFamily::Fj { .. }, 2) => {
                return Err(SlabError::Config(format!(
                    "{} is one-dimensional; use abc11 or dirichlet in 2D",
                    self.boundary.family.name()
                )))
            }
            (AbcFamily::Fj { order, velocities }, _) => {
                let p = velocities.as_ref().map_or(*order, Vec::len);
                if p == 0 || p > 3 {
                    return Err(crate::abc::AbcError::UnsupportedOrder(p).into());
                }
            }
            _ => {}
        }
        let needs_estimator = active_edges(dim)
            .iter()
            .any(|&e| self.boundary.mode(e) == ParamMode::Adaptive)
            && self.boundary.family != AbcFamily::Dirichlet;
        if needs_estimator {
            for &e in active_edges(dim) {
                let len = match e.normal() {
                    crate::grid::Axis::X => self.grid.x.length(),
                    crate::grid::Axis::Y => self.grid.y.map_or(0.0, |a| a.length()),
                };
                self.adaptive.validate(len)?;
            }
        }
        for &e in active_edges(dim) {
            if let ParamMode::Fixed(k) = self.boundary.mode(e) {
                if !(k >= 0.0) || !k.is_finite() {
                    return Err(SlabError::Config(format!("fixed k0 = {k} on {}", e.name(dim))));
                }
            }
        }
        if !(self.solver.tol > 0.0 && self.solver.tol < 1.0) || self.solver.max_iter == 0 {
            return Err(SlabError::Config("solver tolerance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}
