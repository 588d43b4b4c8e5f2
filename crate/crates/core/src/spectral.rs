//! Windowed Fourier spectra near artificial boundaries and wave-number
//! estimators built on them.
//!
//! A spectrum is sampled on `k = 0, dk, 2dk, ... <= k_max` by composite
//! trapezoid quadrature of `psi(x) exp(-i k x)` over a rectangular window
//! that abuts the boundary. Lower boundaries (west/south/left) are handled
//! by mirroring the field, so every estimate lives on `k >= 0`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::grid::{AxisSpec, Edge, GridSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("window [{lo}, {hi}] does not fit inside the domain [{domain_lo}, {domain_hi}]")]
    WindowOutsideDomain { lo: f64, hi: f64, domain_lo: f64, domain_hi: f64 },
    #[error("window holds {points} grid points, at least 4 are required")]
    DegenerateWindow { points: usize },
    #[error("invalid spectral configuration: {0}")]
    Config(String),
    #[error("edge {0:?} does not exist on a 1D grid")]
    NoSuchEdge(Edge),
}

/// Which spatial transform feeds the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Whole computational domain.
    Fourier,
    /// Rectangular window next to the boundary.
    Gabor,
}

/// How the Gabor window width is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowRule {
    Fixed(f64),
    /// `b = beta * k0`, using the previous step's estimate.
    Proportional(f64),
}

/// Uniform wave-number grid `0, step, 2 step, ... <= max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid {
    pub step: f64,
    pub max: f64,
}

impl KGrid {
    pub fn new(step: f64, max: f64) -> Result<Self, SpectralError> {
        if !(step > 0.0) || !(max > 0.0) || !step.is_finite() || !max.is_finite() {
            return Err(SpectralError::Config(format!("k grid step {step}, max {max}")));
        }
        Ok(Self { step, max })
    }

    /// Default grid for a domain of length `length` sampled at `dx`: four
    /// times finer than the Fourier resolution, up to the grid Nyquist number.
    pub fn for_domain(length: f64, dx: f64) -> Self {
        Self { step: 2.0 * PI / length / 4.0, max: PI / dx }
    }

    pub fn len(&self) -> usize {
        (self.max / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|m| m as f64 * self.step).collect()
    }
}

/// Estimator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub transform: Transform,
    /// Weighting exponent; `f64::INFINITY` selects the spectral maximum.
    pub p: f64,
    pub window: WindowRule,
    pub k_grid: KGrid,
    pub k_floor: f64,
    pub refresh_every: usize,
}

impl AdaptiveConfig {
    pub fn validate(&self, domain_length: f64) -> Result<(), SpectralError> {
        if !(self.p > 0.0) {
            return Err(SpectralError::Config(format!("p = {} must be positive", self.p)));
        }
        if !(self.k_floor >= 0.0) || self.k_floor > self.k_grid.max {
            return Err(SpectralError::Config(format!("k_floor = {}", self.k_floor)));
        }
        if self.refresh_every == 0 {
            return Err(SpectralError::Config("refresh_every must be >= 1".into()));
        }
        match self.window {
            WindowRule::Fixed(b) if !(b > 0.0) || b > domain_length * (1.0 + 1e-12) => Err(
                SpectralError::Config(format!("window {b} outside (0, {domain_length}]")),
            ),
            WindowRule::Proportional(beta) if !(beta > 0.0) => {
                Err(SpectralError::Config(format!("window beta {beta} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Sampled spectrum `|psi_hat(k)|` on a uniform k grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub k_values: Vec<f64>,
    pub values: Vec<Complex64>,
    pub magnitudes: Vec<f64>,
    pub k_step: f64,
}

impl SpectrumSample {
    /// Builds a sample from magnitudes alone (phases unknown, set to zero).
    pub fn from_magnitudes(k_step: f64, magnitudes: Vec<f64>) -> Self {
        let k_values = (0..magnitudes.len()).map(|m| m as f64 * k_step).collect();
        let values = magnitudes.iter().map(|&m| Complex64::new(m, 0.0)).collect();
        Self { k_values, values, magnitudes, k_step }
    }
}

/// Precomputed quadrature table `w_m exp(-i k (x_m - x_0))` for windows of
/// a fixed number of points.
#[derive(Debug, Clone)]
struct DftTable {
    points: usize,
    table: Vec<Complex64>,
}

impl DftTable {
    fn new(points: usize, dx: f64, k: &[f64]) -> Self {
        let mut table = Vec::with_capacity(points * k.len());
        for &kk in k {
            for m in 0..points {
                let w = if m == 0 || m + 1 == points { 0.5 * dx } else { dx };
                table.push(Complex64::from_polar(w, -kk * m as f64 * dx));
            }
        }
        Self { points, table }
    }

    /// Quadrature sums of `samples` (length `points`) for every k.
    fn apply(&self, samples: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(samples.len(), self.points);
        for (row, o) in self.table.chunks_exact(self.points).zip(out.iter_mut()) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, s) in row.iter().zip(samples) {
                acc += t * s;
            }
            *o = acc;
        }
    }
}

fn snap_window(axis: &AxisSpec, lo: f64, hi: f64) -> Result<(usize, usize), SpectralError> {
    let tol = 1e-9 * axis.spacing();
    if lo < axis.lo - tol || hi > axis.hi + tol || hi <= lo {
        return Err(SpectralError::WindowOutsideDomain {
            lo,
            hi,
            domain_lo: axis.lo,
            domain_hi: axis.hi,
        });
    }
    let a = axis.nearest_index(lo);
    let b = axis.nearest_index(hi);
    let points = b + 1 - a.min(b + 1);
    if points < 4 {
        return Err(SpectralError::DegenerateWindow { points });
    }
    Ok((a, b))
}

/// Trapezoid quadrature of `psi(x) exp(-i k x)` over `window`, for every k
/// on `k_grid`. `samples` are the field values on `axis`.
pub fn windowed_dft(
    samples: &[Complex64],
    axis: &AxisSpec,
    window: (f64, f64),
    k_grid: &KGrid,
) -> Result<SpectrumSample, SpectralError> {
    if samples.len() != axis.points() {
        return Err(SpectralError::Config(format!(
            "{} samples on an axis of {} points",
            samples.len(),
            axis.points()
        )));
    }
    let (a, b) = snap_window(axis, window.0, window.1)?;
    let k_values = k_grid.values();
    let table = DftTable::new(b - a + 1, axis.spacing(), &k_values);
    let mut values = vec![Complex64::new(0.0, 0.0); k_values.len()];
    table.apply(&samples[a..=b], &mut values);
    let x0 = axis.coord(a);
    for (v, &k) in values.iter_mut().zip(&k_values) {
        *v *= Complex64::from_polar(1.0, -k * x0);
    }
    let magnitudes = values.iter().map(|v| v.norm()).collect();
    Ok(SpectrumSample { k_values, values, magnitudes, k_step: k_grid.step })
}

/// Wave number of the largest spectral magnitude; ties go to the smaller k.
/// `None` when the spectrum is identically zero.
pub fn pick_k0_max(spectrum: &SpectrumSample) -> Option<f64> {
    let mut best: Option<(usize, f64)> = None;
    for (m, &mag) in spectrum.magnitudes.iter().enumerate() {
        if best.is_none_or(|(_, b)| mag > b) {
            best = Some((m, mag));
        }
    }
    match best {
        Some((m, mag)) if mag > 0.0 => Some(spectrum.k_values[m]),
        _ => None,
    }
}

/// Energy-weighted mean wave number `sum |F|^p k / sum |F|^p`.
/// `None` when the spectrum is identically zero.
pub fn pick_k0_weighted(spectrum: &SpectrumSample, p: f64) -> Option<f64> {
    if p.is_infinite() {
        return pick_k0_max(spectrum);
    }
    let peak = spectrum.magnitudes.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    // Normalizing by the peak keeps |F|^p representable for large p.
    let (mut num, mut den) = (0.0, 0.0);
    for (&mag, &k) in spectrum.magnitudes.iter().zip(&spectrum.k_values) {
        let w = (mag / peak).powf(p);
        num += w * k;
        den += w;
    }
    Some(num / den)
}

/// Window width for the next estimate.
pub fn adaptive_window(rule: WindowRule, k0_prev: f64, domain_length: f64, dx: f64) -> f64 {
    match rule {
        WindowRule::Fixed(b) => b,
        WindowRule::Proportional(beta) => (beta * k0_prev).clamp(4.0 * dx, domain_length),
    }
}

/// Stateful estimator holding cached quadrature tables for one grid.
#[derive(Debug, Default)]
pub struct Estimator {
    tables: HashMap<(usize, u64), DftTable>,
}

impl Estimator {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure_table(&mut self, points: usize, dx: f64, k_grid: &KGrid) {
        self.tables
            .entry((points, dx.to_bits()))
            .or_insert_with(|| DftTable::new(points, dx, &k_grid.values()));
    }

    /// Per-tangential-point wave-number parameters along `edge`. `prev`
    /// supplies the previous estimates for proportional windows (`k_floor`
    /// is used when absent). In 1D only `West`/`East` exist and the profile
    /// has a single entry.
    pub fn edge_profile(
        &mut self,
        grid: &GridSpec,
        field: &[Complex64],
        edge: Edge,
        cfg: &AdaptiveConfig,
        prev: Option<&[f64]>,
    ) -> Result<Vec<f64>, SpectralError> {
        let normal_axis = match (edge, grid.y) {
            (Edge::West | Edge::East, _) => grid.x,
            (Edge::South | Edge::North, Some(y)) => y,
            (_, None) => return Err(SpectralError::NoSuchEdge(edge)),
        };
        let n = normal_axis.points();
        let dx = normal_axis.spacing();
        let length = normal_axis.length();
        let tangential = match edge {
            Edge::West | Edge::East => grid.ny(),
            Edge::South | Edge::North => grid.nx(),
        };

        // Window extent per tangential point, in points counted from the boundary.
        let widths: Vec<usize> = (0..tangential)
            .map(|t| {
                let b = match cfg.transform {
                    Transform::Fourier => length,
                    Transform::Gabor => {
                        let k_prev = prev.and_then(|p| p.get(t)).copied().unwrap_or(cfg.k_floor);
                        adaptive_window(cfg.window, k_prev, length, dx)
                    }
                };
                if b > length * (1.0 + 1e-12) {
                    return Err(SpectralError::WindowOutsideDomain {
                        lo: normal_axis.hi - b,
                        hi: normal_axis.hi,
                        domain_lo: normal_axis.lo,
                        domain_hi: normal_axis.hi,
                    });
                }
                let pts = (b / dx).round() as usize + 1;
                if pts < 4 {
                    return Err(SpectralError::DegenerateWindow { points: pts });
                }
                Ok(pts.min(n))
            })
            .collect::<Result<_, _>>()?;

        for &w in &widths {
            self.ensure_table(w, dx, &cfg.k_grid);
        }
        let tables = &self.tables;
        let nk = cfg.k_grid.len();
        let k_step = cfg.k_grid.step;

        let estimate = |t: usize| -> f64 {
            let pts = widths[t];
            // Samples ordered from the interior toward the boundary's outward
            // direction, so mirrored lower edges see outgoing waves as k > 0.
            let samples: Vec<Complex64> = (0..pts)
                .map(|m| {
                    let k = if edge.is_upper() { n - pts + m } else { pts - 1 - m };
                    let id = match edge {
                        Edge::West | Edge::East => grid.id(k, t),
                        Edge::South | Edge::North => grid.id(t, k),
                    };
                    field[id]
                })
                .collect();
            let table = &tables[&(pts, dx.to_bits())];
            let mut values = vec![Complex64::new(0.0, 0.0); nk];
            table.apply(&samples, &mut values);
            let magnitudes: Vec<f64> = values.iter().map(|v| v.norm()).collect();
            let spectrum = SpectrumSample {
                k_values: cfg.k_grid.values(),
                values,
                magnitudes,
                k_step,
            };
            pick_k0_weighted(&spectrum, cfg.p)
                .unwrap_or(cfg.k_floor)
                .clamp(cfg.k_floor, cfg.k_grid.max)
        };

        Ok(if tangential > 8 {
            (0..tangential).into_par_iter().map(estimate).collect()
        } else {
            (0..tangential).map(estimate).collect()
        })
    }
}

/// One-shot edge profile with a fresh estimator.
pub fn edge_wavenumber_profile(
    grid: &GridSpec,
    field: &[Complex64],
    edge: Edge,
    cfg: &AdaptiveConfig,
) -> Result<Vec<f64>, SpectralError> {
    Estimator::new().edge_profile(grid, field, edge, cfg, None)
}
