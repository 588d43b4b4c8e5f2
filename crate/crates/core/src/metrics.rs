//! Quality metrics, closed-form solutions, a PDE-residual oracle and
//! enlarged-domain reference runs.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{AxisSpec, GridSpec};
use crate::slab::{simulate, PhysicsSpec, SimConfig, SlabError};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("initial field has zero mass; the reflection ratio is undefined")]
    ZeroMass,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("fields of lengths {0} and {1} do not share a grid")]
    Shape(usize, usize),
    #[error("invalid reference configuration: {0}")]
    Config(String),
}

/// Remaining mass fraction `sum |psi_n|^2 / sum |psi_0|^2`.
pub fn reflection_ratio(psi_n: &[Complex64], psi_0: &[Complex64]) -> Result<f64, MetricsError> {
    if psi_n.len() != psi_0.len() {
        return Err(MetricsError::Shape(psi_n.len(), psi_0.len()));
    }
    let m0: f64 = psi_0.iter().map(|z| z.norm_sqr()).sum();
    if !(m0 > 0.0) {
        return Err(MetricsError::ZeroMass);
    }
    Ok(psi_n.iter().map(|z| z.norm_sqr()).sum::<f64>() / m0)
}

/// Mean pointwise distance between two fields on the same grid.
pub fn l1_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(MetricsError::Shape(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).norm()).sum::<f64>() / a.len() as f64)
}

/// `E1 = mean |psi_j - exact(x_j, y_j)|` over the grid points.
pub fn l1_error(numerical: &[Complex64], grid: &GridSpec, exact: impl Fn(f64, f64) -> Complex64) -> f64 {
    let total: f64 = numerical.iter().zip(grid.points()).map(|(z, (x, y))| (z - exact(x, y)).norm()).sum();
    total / numerical.len() as f64
}

/// Bright soliton of `i psi_t = -psi_xx + g |psi|^2 psi`: amplitude
/// parameter `A`, velocity parameter `B` (speed `2B`) and initial centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    pub amplitude: f64,
    pub velocity: f64,
    pub center: f64,
}

/// `A sqrt(-2/g) sech(A (x - 2Bt - xc)) exp(i (B x + (A^2 - B^2) t - B xc))`.
pub fn bright_soliton(x: f64, t: f64, s: &SolitonParams, g: f64) -> Result<Complex64, MetricsError> {
    if !(g < 0.0) {
        return Err(MetricsError::Parameter(format!("bright solitons need g < 0, got {g}")));
    }
    if !(s.amplitude > 0.0) {
        return Err(MetricsError::Parameter(format!("amplitude {} must be positive", s.amplitude)));
    }
    let (a, b) = (s.amplitude, s.velocity);
    let modulus = a * (-2.0 / g).sqrt() / (a * (x - 2.0 * b * t - s.center)).cosh();
    Ok(Complex64::from_polar(modulus, b * (x - s.center) + (a * a - b * b) * t))
}

/// The variant whose phase reads `B x + 6 (A^2 - B^2) t` (centred at the
/// origin). It is not a solution; kept to document the discrepancy.
pub fn misprinted_soliton(x: f64, t: f64, amplitude: f64, velocity: f64, g: f64) -> Complex64 {
    let (a, b) = (amplitude, velocity);
    let modulus = a * (-2.0 / g).sqrt() / (a * x - 2.0 * a * b * t).cosh();
    Complex64::from_polar(modulus, b * x + 6.0 * (a * a - b * b) * t)
}

/// Superposition of well-separated solitons, as a function of `(x, t)`.
pub fn soliton_superposition(
    list: &[SolitonParams],
    g: f64,
) -> Result<impl Fn(f64, f64) -> Complex64 + Send + Sync, MetricsError> {
    for s in list {
        bright_soliton(0.0, 0.0, s, g)?;
    }
    let list = list.to_vec();
    Ok(move |x: f64, t: f64| list.iter().map(|s| bright_soliton(x, t, s, g).unwrap_or_default()).sum())
}

// Each step balances h^6 truncation against roundoff (amplified by 1/h^2 in
// space, 1/h in time) for O(1) fields with O(10) phase gradients. Moving
// packets vary faster in t than in x, hence the smaller time step.
const SPACE_STEP: f64 = 1e-2;
const TIME_STEP: f64 = 1e-3;

// Sixth-order centred weights for offsets -3..=3.
const D1: [f64; 7] = [-1.0 / 60.0, 9.0 / 60.0, -45.0 / 60.0, 0.0, 45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0];
const D2: [f64; 7] =
    [2.0 / 180.0, -27.0 / 180.0, 270.0 / 180.0, -490.0 / 180.0, 270.0 / 180.0, -27.0 / 180.0, 2.0 / 180.0];

fn centred(weights: &[f64; 7], h: f64, power: i32, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let s: Complex64 = weights.iter().enumerate().map(|(k, &w)| f((k as f64 - 3.0) * h) * w).sum();
    s / h.powi(power)
}

/// Max over samples `(x, y, t)` of `|i psi_t + Lap psi - f(|psi|^2) psi - V psi|`,
/// with derivatives from sixth-order centred differences. `y` is ignored
/// when `dim == 1`.
pub fn pde_residual(
    candidate: impl Fn(f64, f64, f64) -> Complex64,
    physics: &PhysicsSpec,
    dim: usize,
    samples: &[(f64, f64, f64)],
) -> f64 {
    let (h, k) = (SPACE_STEP, TIME_STEP);
    samples
        .iter()
        .map(|&(x, y, t)| {
            let psi = candidate(x, y, t);
            let psi_t = centred(&D1, k, 1, |d| candidate(x, y, t + d));
            let mut lap = centred(&D2, h, 2, |d| candidate(x + d, y, t));
            if dim == 2 {
                lap += centred(&D2, h, 2, |d| candidate(x, y + d, t));
            }
            let nl = physics.nonlinearity.eval(psi.norm_sqr());
            let v = physics.potential.eval(x, y, dim);
            (I * psi_t + lap - (nl + v) * psi).norm()
        })
        .fold(0.0, f64::max)
}

/// Per-record metric time series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    /// NaN where no exact solution is available.
    pub e1: Vec<f64>,
    /// Indexed by [`crate::grid::Edge`]; NaN for inactive edges.
    pub k0_by_side: [Vec<f64>; 4],
    pub solver_iterations: Vec<usize>,
}

impl MetricSeries {
    pub fn push(&mut self, t: f64, r: f64, e1: Option<f64>, k0: [Option<f64>; 4], iterations: usize) {
        self.times.push(t);
        self.r.push(r);
        self.e1.push(e1.unwrap_or(f64::NAN));
        for (series, k) in self.k0_by_side.iter_mut().zip(k0) {
            series.push(k.unwrap_or(f64::NAN));
        }
        self.solver_iterations.push(iterations);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// How the reference domain relates to the original one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Enlargement {
    /// Length times `factor`, centred on the original domain.
    Symmetric(f64),
    /// Length times `factor`, lower ends kept.
    Upper(f64),
    /// Explicit `x` (and `y`) extents.
    Domain { x: (f64, f64), y: Option<(f64, f64)> },
}

impl Enlargement {
    fn extent(&self, axis: &AxisSpec, explicit: Option<(f64, f64)>) -> Result<(f64, f64), MetricsError> {
        let len = axis.length();
        match *self {
            Enlargement::Symmetric(f) | Enlargement::Upper(f) if !(f > 1.0) => {
                Err(MetricsError::Config(format!("enlargement factor {f} must exceed 1")))
            }
            Enlargement::Symmetric(f) => {
                let pad = 0.5 * (f - 1.0) * len;
                Ok((axis.lo - pad, axis.hi + pad))
            }
            Enlargement::Upper(f) => Ok((axis.lo, axis.lo + f * len)),
            Enlargement::Domain { .. } => {
                explicit.ok_or_else(|| MetricsError::Config("missing y extent".into()))
            }
        }
    }
}

fn enlarge_axis(axis: &AxisSpec, (lo, hi): (f64, f64)) -> Result<(AxisSpec, usize), MetricsError> {
    let h = axis.spacing();
    let offset = (axis.lo - lo) / h;
    let intervals = (hi - lo) / h;
    let whole = |v: f64| (v - v.round()).abs() <= 1e-6;
    if !(lo <= axis.lo && hi >= axis.hi) || !whole(offset) || !whole(intervals) {
        return Err(MetricsError::Config(format!(
            "[{lo}, {hi}] does not extend [{}, {}] by whole cells of {h}",
            axis.lo, axis.hi
        )));
    }
    let big = AxisSpec::new(lo, hi, intervals.round() as usize)
        .map_err(|e| MetricsError::Config(e.to_string()))?;
    Ok((big, offset.round() as usize))
}

/// Reference snapshots restricted to the original grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<Complex64>>,
}

impl ReferenceSolution {
    /// Snapshot recorded at `t` (to within half a step).
    pub fn at(&self, t: f64) -> Option<&[Complex64]> {
        let half = 0.5 * self.grid.dt;
        self.times.iter().position(|&s| (s - t).abs() <= half).map(|k| self.snapshots[k].as_slice())
    }

    /// Value at grid indices `(i, j)` of the original grid at time `t`.
    pub fn sample(&self, t: f64, i: usize, j: usize) -> Option<Complex64> {
        self.at(t).map(|s| s[self.grid.id(i, j)])
    }
}

/// Runs `cfg` on an enlarged domain with the same steps and records the
/// restriction to the original grid at each of `record_times`.
pub fn reference_run(
    cfg: &SimConfig,
    enlargement: Enlargement,
    t_final: f64,
    record_times: &[f64],
) -> Result<ReferenceSolution, SlabError> {
    let grid = cfg.grid;
    let (explicit_x, explicit_y) = match enlargement {
        Enlargement::Domain { x, y } => (Some(x), y),
        _ => (None, None),
    };
    let (big_x, off_x) = enlarge_axis(&grid.x, enlargement.extent(&grid.x, explicit_x)?)?;
    let (big, off_y) = match grid.y {
        None => (GridSpec::new_1d(big_x, grid.dt)?, 0),
        Some(y) => {
            let (big_y, off_y) = enlarge_axis(&y, enlargement.extent(&y, explicit_y)?)?;
            (GridSpec::new_2d(big_x, big_y, grid.dt)?, off_y)
        }
    };
    let steps: Vec<usize> = record_times.iter().map(|&t| (t / grid.dt).round() as usize).collect();
    let big_cfg = SimConfig { grid: big, ..cfg.clone() };
    let mut out = ReferenceSolution { grid, times: Vec::new(), snapshots: Vec::new() };
    simulate(big_cfg, t_final, |sim, _| {
        let n = sim.step_index();
        if steps.contains(&n) {
            let field = &sim.field().current;
            let restricted = (0..grid.len())
                .map(|id| {
                    let (i, j) = grid.coords_of(id);
                    field[big.id(i + off_x, j + off_y)]
                })
                .collect();
            out.times.push(sim.time());
            out.snapshots.push(restricted);
        }
    })?;
    Ok(out)
}
