use num_complex::Complex64;

use crate::abc::AbcFamily;
use crate::grid::{Edge, WaveField};
use crate::linsolve::{solve_banded, solve_sparse, SolveReport};
use crate::spectral::Estimator;

use super::config::{active_edges, ParamMode, SimConfig};
use super::step::{assemble_step, boundary_rows, effective_potential, sample_potential, split_on_band, EdgeProfiles};
use super::SlabError;

/// What one step reports.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// Index of the level just computed.
    pub step: usize,
    pub time: f64,
    /// Parameter used on each edge (mean over the edge in 2D), indexed by [`Edge`].
    pub k0: [Option<f64>; 4],
    pub solve: SolveReport,
}

/// A running simulation: field levels plus boundary-parameter state.
#[derive(Debug)]
pub struct Simulation {
    cfg: SimConfig,
    field: WaveField,
    potential: Vec<f64>,
    estimator: Estimator,
    profiles: EdgeProfiles,
    initial_mass: f64,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self, SlabError> {
        cfg.validate()?;
        let sampler = cfg.initial.sampler(&cfg.physics, cfg.grid.dim())?;
        let data = cfg.grid.points().map(|(x, y)| sampler(x, y)).collect();
        Self::with_initial(cfg, data)
    }

    /// Starts from explicit initial data.
    pub fn with_initial(cfg: SimConfig, data: Vec<Complex64>) -> Result<Self, SlabError> {
        cfg.validate()?;
        let field = WaveField::new(cfg.grid, data)?;
        if !field.all_finite() {
            return Err(SlabError::NonFinite { step: 0 });
        }
        let potential = sample_potential(&cfg.grid, &cfg.physics);
        let (nx, ny) = (cfg.grid.nx(), cfg.grid.ny());
        let init = |edge: Edge, len: usize| match cfg.boundary.mode(edge) {
            ParamMode::Fixed(k) => vec![k; len],
            ParamMode::Adaptive => vec![cfg.adaptive.k_floor; len],
        };
        let profiles = [init(Edge::West, ny), init(Edge::East, ny), init(Edge::South, nx), init(Edge::North, nx)];
        let initial_mass = mass_of(&field.current, cfg.grid.cell_volume());
        Ok(Self { cfg, field, potential, estimator: Estimator::new(), profiles, initial_mass })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn field(&self) -> &WaveField {
        &self.field
    }

    pub fn time(&self) -> f64 {
        self.field.time()
    }

    pub fn step_index(&self) -> usize {
        self.field.time_index
    }

    pub fn profiles(&self) -> &EdgeProfiles {
        &self.profiles
    }

    /// Discrete mass `sum |psi|^2 * cell volume` of the current level.
    pub fn mass(&self) -> f64 {
        mass_of(&self.field.current, self.cfg.grid.cell_volume())
    }

    pub fn initial_mass(&self) -> f64 {
        self.initial_mass
    }

    fn adaptive_edges(&self) -> Vec<Edge> {
        if self.cfg.boundary.family == AbcFamily::Dirichlet {
            return Vec::new();
        }
        active_edges(self.cfg.grid.dim())
            .iter()
            .copied()
            .filter(|&e| self.cfg.boundary.mode(e) == ParamMode::Adaptive)
            .collect()
    }

    /// Re-estimates every adaptive edge from the current level.
    pub fn refresh_parameters(&mut self) -> Result<(), SlabError> {
        let grid = self.cfg.grid;
        for edge in self.adaptive_edges() {
            let cfg = self.cfg.adaptive;
            // Before the first estimate the profile holds k_floor.
            let prev = self.profiles[edge as usize].clone();
            self.profiles[edge as usize] =
                self.estimator.edge_profile(&grid, &self.field.current, edge, &cfg, Some(&prev))?;
        }
        Ok(())
    }

    /// One SLAB step: parameter refresh, boundary phase step, assembly,
    /// solve, commit.
    pub fn advance(&mut self) -> Result<StepDiagnostics, SlabError> {
        let n = self.field.time_index;
        let step = n + 1;
        if n % self.cfg.adaptive.refresh_every == 0 {
            self.refresh_parameters()?;
        }
        let grid = self.cfg.grid;
        let nl = self.cfg.physics.nonlinearity;
        let layers = self.cfg.boundary.family.band_layers();
        let psi_star = split_on_band(&grid, &self.field.current, nl, grid.dt, layers);
        let w = effective_potential(&self.field.current, &self.field.previous, nl, &self.potential);
        let rows = boundary_rows(
            &grid,
            &self.cfg.boundary,
            &self.profiles,
            &self.potential,
            &psi_star,
            self.cfg.adaptive.k_floor,
        )?;
        let system = assemble_step(&grid, &self.field.current, &w, rows)?;
        let (next, report) = if grid.dim() == 1 {
            solve_banded(&system).map_err(|source| SlabError::Solve { step, source })?
        } else {
            solve_sparse(&system, self.cfg.solver, Some(&self.field.current))
                .map_err(|source| SlabError::Solve { step, source })?
        };
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(SlabError::NonFinite { step });
        }
        if !report.converged {
            return Err(SlabError::NotConverged { step, report });
        }
        self.field.commit(next);
        Ok(StepDiagnostics { step, time: self.field.time(), k0: self.k0_summary(), solve: report })
    }

    /// Parameter in use on each active edge (mean over the edge in 2D).
    pub fn k0_summary(&self) -> [Option<f64>; 4] {
        let mut out = [None; 4];
        if self.cfg.boundary.family == AbcFamily::Dirichlet {
            return out;
        }
        for &e in active_edges(self.cfg.grid.dim()) {
            let p = &self.profiles[e as usize];
            out[e as usize] = Some(p.iter().sum::<f64>() / p.len() as f64);
        }
        out
    }
}

pub fn mass_of(psi: &[Complex64], cell_volume: f64) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell_volume
}

/// Number of steps that reach `t_final` exactly.
pub fn steps_to(t_final: f64, dt: f64) -> Result<usize, SlabError> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(SlabError::Config(format!("t_final = {t_final}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(1.0) {
        return Err(SlabError::Config(format!("t_final = {t_final} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

/// A run that stopped early, with the state reached so far (absent when
/// the configuration was rejected before the first step).
#[derive(Debug)]
pub struct RunFailure {
    pub simulation: Option<Box<Simulation>>,
    pub error: SlabError,
}

/// Runs from t = 0 to `t_final`. `observe` sees the initial state (with no
/// diagnostics) and the state after every step.
pub fn simulate(
    cfg: SimConfig,
    t_final: f64,
    mut observe: impl FnMut(&Simulation, Option<&StepDiagnostics>),
) -> Result<Simulation, SlabError> {
    simulate_partial(cfg, t_final, &mut observe).map_err(|f| f.error)
}

/// Like [`simulate`] but hands back the partial state on failure.
pub fn simulate_partial(
    cfg: SimConfig,
    t_final: f64,
    observe: &mut dyn FnMut(&Simulation, Option<&StepDiagnostics>),
) -> Result<Simulation, RunFailure> {
    let rejected = |error| RunFailure { simulation: None, error };
    let steps = steps_to(t_final, cfg.grid.dt).map_err(rejected)?;
    let mut sim = Simulation::new(cfg).map_err(rejected)?;
    observe(&sim, None);
    for _ in 0..steps {
        match sim.advance() {
            Ok(d) => observe(&sim, Some(&d)),
            Err(error) => return Err(RunFailure { simulation: Some(Box::new(sim)), error }),
        }
    }
    Ok(sim)
}
