//! Flat `key = value` run configuration, presets and resolution into a
//! [`SimConfig`].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::abc::AbcFamily;
use crate::grid::{AxisSpec, Edge, GridSpec};
use crate::linsolve::KrylovConfig;
use crate::metrics::{Enlargement, SolitonParams};
use crate::slab::{
    active_edges, steps_to, BoundaryConfig, InitialCondition, Nonlinearity, ParamMode, PhysicsSpec,
    Potential, SimConfig,
};
use crate::spectral::{AdaptiveConfig, KGrid, Transform, WindowRule};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Custom,
    Example1,
    Example2,
    Example3,
    /// Single soliton away from the boundaries (convergence studies).
    Soliton,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Custom => "custom",
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Example3 => "example3",
            Preset::Soliton => "soliton",
        }
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "custom" => Preset::Custom,
            "example1" => Preset::Example1,
            "example2" => Preset::Example2,
            "example3" => Preset::Example3,
            "soliton" => Preset::Soliton,
            _ => return Err(format!("unknown preset `{s}` (custom, example1, example2, example3, soliton)")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbcKind {
    Abc11,
    Abc10,
    Fj,
    Dirichlet,
}

impl FromStr for AbcKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "abc11" => AbcKind::Abc11,
            "abc10" => AbcKind::Abc10,
            "fj" => AbcKind::Fj,
            "dirichlet" => AbcKind::Dirichlet,
            _ => return Err(format!("unknown boundary condition `{s}` (abc11, abc10, fj, dirichlet)")),
        })
    }
}

/// Every knob of a run. `None` fields are derived during [`RunConfig::resolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub dim: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub dx: f64,
    /// Defaults to `dx`.
    pub dy: Option<f64>,
    /// Defaults to `dx^2`.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Cubic coupling; zero means linear.
    pub g: f64,
    pub potential: Potential,
    pub initial: InitialCondition,
    pub abc: AbcKind,
    pub abc10_alphas: Option<(f64, f64)>,
    pub fj_order: usize,
    pub fj_velocities: Option<Vec<f64>>,
    /// Indexed by [`Edge`].
    pub k0: [ParamMode; 4],
    pub transform: Transform,
    pub p: f64,
    /// Defaults to a fixed window of a quarter of the x extent.
    pub window: Option<WindowRule>,
    /// Defaults to the grid Nyquist number `pi / min(dx, dy)`.
    pub k_max: Option<f64>,
    /// Defaults to a quarter of the Fourier resolution `2 pi / L`.
    pub k_step: Option<f64>,
    pub k_floor: f64,
    pub refresh_every: usize,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    /// Defaults to every 0.5 time units plus `t_final`.
    pub snapshot_times: Option<Vec<f64>>,
    /// Steps between metrics rows; defaults to about every 0.05 time units.
    pub metrics_every: Option<usize>,
    pub probes: Vec<(f64, f64)>,
    pub reference: Option<Enlargement>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Custom,
            dim: 1,
            x_lo: 0.0,
            x_hi: 10.0,
            y_lo: 0.0,
            y_hi: 10.0,
            dx: 0.1,
            dy: None,
            dt: None,
            t_final: 1.0,
            g: 0.0,
            potential: Potential::Constant(0.0),
            initial: InitialCondition::Gaussian { amplitude: 1.0, rate: 1.0, x0: 5.0, kx: 0.0, y0: 5.0, ky: 0.0 },
            abc: AbcKind::Abc11,
            abc10_alphas: None,
            fj_order: 1,
            fj_velocities: None,
            k0: [ParamMode::Adaptive; 4],
            transform: Transform::Gabor,
            p: 4.0,
            window: None,
            k_max: None,
            k_step: None,
            k_floor: 0.05,
            refresh_every: 1,
            solver_tol: 1e-10,
            solver_max_iter: 500,
            snapshot_times: None,
            metrics_every: None,
            probes: Vec::new(),
            reference: None,
            output_dir: PathBuf::from("slab-out"),
        }
    }
}

const EXAMPLE1_SOLITONS: [SolitonParams; 2] = [
    SolitonParams { amplitude: 1.0, velocity: 2.0, center: 10.0 },
    SolitonParams { amplitude: 1.0, velocity: 5.0, center: 30.0 },
];

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self { preset, ..Self::default() };
        match preset {
            Preset::Custom => base,
            Preset::Example1 => {
                let mut k0 = [ParamMode::Adaptive; 4];
                k0[Edge::West as usize] = ParamMode::Fixed(0.0);
                Self {
                    x_hi: 40.0,
                    t_final: 10.0,
                    g: -2.0,
                    initial: InitialCondition::Solitons(EXAMPLE1_SOLITONS.to_vec()),
                    k0,
                    ..base
                }
            }
            Preset::Example2 => Self {
                x_hi: 30.0,
                dt: Some(0.01),
                t_final: 6.0,
                g: 2.0,
                potential: Potential::Gaussian { amplitude: 1.0, sigma: 1.0, x0: 15.0, y0: 0.0 },
                initial: InitialCondition::Gaussian { amplitude: 1.0, rate: 0.1, x0: 15.0, kx: 0.0, y0: 0.0, ky: 0.0 },
                reference: Some(Enlargement::Symmetric(2.0)),
                ..base
            },
            Preset::Example3 => Self {
                dim: 2,
                dx: 0.05,
                t_final: 2.0,
                g: -1.0,
                initial: InitialCondition::Gaussian {
                    amplitude: 2f64.sqrt(),
                    rate: 1.0,
                    x0: 5.0,
                    kx: 2.0,
                    y0: 5.0,
                    ky: 2.0,
                },
                probes: vec![(10.0, 10.0), (10.0, 5.0)],
                ..base
            },
            Preset::Soliton => {
                let mut k0 = [ParamMode::Adaptive; 4];
                k0[Edge::West as usize] = ParamMode::Fixed(0.0);
                Self {
                    x_hi: 40.0,
                    t_final: 1.0,
                    g: -2.0,
                    initial: InitialCondition::Solitons(vec![SolitonParams {
                        amplitude: 1.0,
                        velocity: 2.0,
                        center: 20.0,
                    }]),
                    k0,
                    ..base
                }
            }
        }
    }

    /// Parses `key = value` lines (`#` starts a comment). A `preset` line
    /// selects the starting point; the remaining keys are applied over it
    /// in file order.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        let mut cfg = match pairs.iter().find(|(k, _)| k == "preset") {
            Some((_, v)) => Self::preset(v.parse().map_err(|m| CliError::key("preset", m))?),
            None => Self::default(),
        };
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies the keys of a config file over `self`, skipping `preset`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (k, v) in parse_pairs(text)?.iter().filter(|(k, _)| k != "preset") {
            self.set(k, v)?;
        }
        Ok(())
    }

    fn k0_key_edge(&self, key: &str) -> Option<Edge> {
        Some(match key {
            "k0_left" | "k0_west" => Edge::West,
            "k0_right" | "k0_east" => Edge::East,
            "k0_south" => Edge::South,
            "k0_north" => Edge::North,
            _ => return None,
        })
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        let err = |m: String| CliError::key(key, m);
        match key {
            "preset" => self.preset = v.parse().map_err(err)?,
            "dim" => {
                self.dim = parse_num(v).map_err(err)?;
                if !(1..=2).contains(&self.dim) {
                    return Err(CliError::key(key, "must be 1 or 2"));
                }
            }
            "x_lo" => self.x_lo = parse_f(v).map_err(err)?,
            "x_hi" => self.x_hi = parse_f(v).map_err(err)?,
            "y_lo" => self.y_lo = parse_f(v).map_err(err)?,
            "y_hi" => self.y_hi = parse_f(v).map_err(err)?,
            "dx" => self.dx = parse_f(v).map_err(err)?,
            "dy" => self.dy = parse_opt(v, parse_f).map_err(err)?,
            "dt" => self.dt = parse_opt(v, parse_f).map_err(err)?,
            "t_final" => self.t_final = parse_f(v).map_err(err)?,
            "g" => self.g = parse_f(v).map_err(err)?,
            "potential" => self.potential = parse_potential(v).map_err(err)?,
            "initial" => self.initial = parse_initial(v).map_err(err)?,
            "abc" => self.abc = v.parse().map_err(err)?,
            "abc10_alphas" => {
                self.abc10_alphas = parse_opt(v, |s| {
                    let f = parse_fields(s, 2, 2)?;
                    Ok((f[0], f[1]))
                })
                .map_err(err)?
            }
            "fj_order" => self.fj_order = parse_num(v).map_err(err)?,
            "fj_velocities" => self.fj_velocities = parse_opt(v, parse_list).map_err(err)?,
            "transform" => {
                self.transform = match v {
                    "fourier" => Transform::Fourier,
                    "gabor" => Transform::Gabor,
                    _ => return Err(err(format!("unknown transform `{v}` (fourier, gabor)"))),
                }
            }
            "p" => self.p = parse_f(v).map_err(err)?,
            "window" => self.window = parse_opt(v, parse_window).map_err(err)?,
            "k_max" => self.k_max = parse_opt(v, parse_f).map_err(err)?,
            "k_step" => self.k_step = parse_opt(v, parse_f).map_err(err)?,
            "k_floor" => self.k_floor = parse_f(v).map_err(err)?,
            "refresh_every" => self.refresh_every = parse_num(v).map_err(err)?,
            "solver_tol" => self.solver_tol = parse_f(v).map_err(err)?,
            "solver_max_iter" => self.solver_max_iter = parse_num(v).map_err(err)?,
            "snapshot_times" => {
                self.snapshot_times = parse_opt(v, |s| if s == "none" { Ok(Vec::new()) } else { parse_list(s) })
                    .map_err(err)?
            }
            "metrics_every" => self.metrics_every = parse_opt(v, parse_num).map_err(err)?,
            "probes" => self.probes = parse_probes(v).map_err(err)?,
            "reference" => self.reference = parse_reference(v).map_err(err)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => match self.k0_key_edge(key) {
                Some(edge) => self.k0[edge as usize] = parse_mode(v).map_err(err)?,
                None => return Err(CliError::key(key, "unknown key")),
            },
        }
        Ok(())
    }

    fn lengths(&self) -> (f64, f64) {
        (self.x_hi - self.x_lo, self.y_hi - self.y_lo)
    }

    fn spacing_y(&self) -> f64 {
        self.dy.unwrap_or(self.dx)
    }

    /// Fills every derived value and checks every key.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut r = self.clone();
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::key(key, format!("{v} must be positive and finite")))
            }
        };
        positive("dx", r.dx)?;
        let (lx, ly) = r.lengths();
        if !(lx > 0.0) {
            return Err(CliError::key("x_hi", "must exceed x_lo"));
        }
        AxisSpec::with_spacing(r.x_lo, r.x_hi, r.dx).map_err(|e| CliError::key("dx", e.to_string()))?;
        if r.dim == 2 {
            r.dy = Some(r.spacing_y());
            positive("dy", r.spacing_y())?;
            if !(ly > 0.0) {
                return Err(CliError::key("y_hi", "must exceed y_lo"));
            }
            AxisSpec::with_spacing(r.y_lo, r.y_hi, r.spacing_y())
                .map_err(|e| CliError::key("dy", e.to_string()))?;
        } else {
            r.dy = None;
        }
        let dt = r.dt.unwrap_or(r.dx * r.dx);
        positive("dt", dt)?;
        r.dt = Some(dt);
        steps_to(r.t_final, dt).map_err(|e| CliError::key("t_final", e.to_string()))?;
        if !r.g.is_finite() {
            return Err(CliError::key("g", "must be finite"));
        }
        if !(r.p > 0.0) {
            return Err(CliError::key("p", format!("{} must be positive", r.p)));
        }
        let window = r.window.unwrap_or(WindowRule::Fixed(lx / 4.0));
        match window {
            WindowRule::Fixed(b) if !(b > 0.0) || b > lx.min(if r.dim == 2 { ly } else { lx }) * (1.0 + 1e-12) => {
                return Err(CliError::key("window", format!("width {b} outside (0, domain length]")))
            }
            WindowRule::Proportional(beta) if !(beta > 0.0) => {
                return Err(CliError::key("window", format!("beta {beta} must be positive")))
            }
            _ => {}
        }
        r.window = Some(window);
        let h_min = if r.dim == 2 { r.dx.min(r.spacing_y()) } else { r.dx };
        r.k_max = Some(r.k_max.unwrap_or(PI / h_min));
        r.k_step = Some(r.k_step.unwrap_or(2.0 * PI / lx / 4.0));
        KGrid::new(r.k_step.unwrap(), r.k_max.unwrap()).map_err(|e| CliError::key("k_step", e.to_string()))?;
        if !(r.k_floor >= 0.0) || r.k_floor > r.k_max.unwrap() {
            return Err(CliError::key("k_floor", format!("{} outside [0, k_max]", r.k_floor)));
        }
        if r.refresh_every == 0 {
            return Err(CliError::key("refresh_every", "must be at least 1"));
        }
        if !(r.solver_tol > 0.0 && r.solver_tol < 1.0) {
            return Err(CliError::key("solver_tol", "must lie in (0, 1)"));
        }
        if r.solver_max_iter == 0 {
            return Err(CliError::key("solver_max_iter", "must be at least 1"));
        }
        if let Some(list) = &r.fj_velocities {
            if list.is_empty() || list.len() > 3 {
                return Err(CliError::key("fj_velocities", "needs 1 to 3 values"));
            }
        } else if !(1..=3).contains(&r.fj_order) {
            return Err(CliError::key("fj_order", "must be 1, 2 or 3"));
        }
        if r.snapshot_times.is_none() {
            // Half-unit marks that fall on a step, plus the final time.
            let mut times: Vec<f64> = (0..)
                .map(|k| 0.5 * k as f64)
                .take_while(|&t| t < r.t_final)
                .filter(|&t| steps_to(t, dt).is_ok())
                .collect();
            times.push(r.t_final);
            r.snapshot_times = Some(times);
        }
        for &t in r.snapshot_times.as_ref().unwrap() {
            if !(0.0..=r.t_final).contains(&t) {
                return Err(CliError::key("snapshot_times", format!("{t} outside [0, t_final]")));
            }
            steps_to(t, dt).map_err(|e| CliError::key("snapshot_times", e.to_string()))?;
        }
        r.metrics_every = Some(r.metrics_every.unwrap_or(((0.05 / dt).round() as usize).max(1)));
        if r.metrics_every == Some(0) {
            return Err(CliError::key("metrics_every", "must be at least 1"));
        }
        for &(x, y) in &r.probes {
            let inside_y = r.dim == 1 || (r.y_lo..=r.y_hi).contains(&y);
            if !(r.x_lo..=r.x_hi).contains(&x) || !inside_y {
                return Err(CliError::key("probes", format!("({x}, {y}) outside the domain")));
            }
        }
        if r.dim == 2 && matches!(r.abc, AbcKind::Abc10 | AbcKind::Fj) {
            return Err(CliError::key("abc", "abc10 and fj are one-dimensional"));
        }
        if let InitialCondition::Solitons(_) = r.initial {
            if r.dim != 1 || !(r.g < 0.0) {
                return Err(CliError::key("initial", "solitons need dim = 1 and g < 0"));
            }
        }
        r.sim_config()?.validate().map_err(|e| CliError::key("config", e.to_string()))?;
        Ok(r)
    }

    /// Builds the simulation configuration; call on a resolved config.
    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let dt = self.dt.unwrap_or(self.dx * self.dx);
        let x = AxisSpec::with_spacing(self.x_lo, self.x_hi, self.dx).map_err(|e| CliError::key("dx", e.to_string()))?;
        let grid = if self.dim == 2 {
            let y = AxisSpec::with_spacing(self.y_lo, self.y_hi, self.spacing_y())
                .map_err(|e| CliError::key("dy", e.to_string()))?;
            GridSpec::new_2d(x, y, dt)
        } else {
            GridSpec::new_1d(x, dt)
        }
        .map_err(|e| CliError::key("dt", e.to_string()))?;
        let family = match self.abc {
            AbcKind::Abc11 => AbcFamily::Abc11,
            AbcKind::Abc10 => AbcFamily::Abc10 { alphas: self.abc10_alphas },
            AbcKind::Fj => AbcFamily::Fj { order: self.fj_order, velocities: self.fj_velocities.clone() },
            AbcKind::Dirichlet => AbcFamily::Dirichlet,
        };
        let nonlinearity = if self.g == 0.0 { Nonlinearity::Linear } else { Nonlinearity::Cubic { g: self.g } };
        let (lx, _) = self.lengths();
        let h_min = if self.dim == 2 { self.dx.min(self.spacing_y()) } else { self.dx };
        Ok(SimConfig {
            grid,
            physics: PhysicsSpec { nonlinearity, potential: self.potential },
            initial: self.initial.clone(),
            boundary: BoundaryConfig { family, modes: self.k0 },
            adaptive: AdaptiveConfig {
                transform: self.transform,
                p: self.p,
                window: self.window.unwrap_or(WindowRule::Fixed(lx / 4.0)),
                k_grid: KGrid {
                    step: self.k_step.unwrap_or(2.0 * PI / lx / 4.0),
                    max: self.k_max.unwrap_or(PI / h_min),
                },
                k_floor: self.k_floor,
                refresh_every: self.refresh_every,
            },
            solver: KrylovConfig { tol: self.solver_tol, max_iter: self.solver_max_iter },
        })
    }

    /// `key = value` lines for every key; on a resolved config this is a
    /// complete, reproducible description of the run.
    pub fn to_text(&self) -> String {
        let mut pairs: Vec<(String, String)> = vec![
            ("preset".into(), self.preset.name().into()),
            ("dim".into(), self.dim.to_string()),
            ("x_lo".into(), self.x_lo.to_string()),
            ("x_hi".into(), self.x_hi.to_string()),
        ];
        if self.dim == 2 {
            pairs.push(("y_lo".into(), self.y_lo.to_string()));
            pairs.push(("y_hi".into(), self.y_hi.to_string()));
        }
        pairs.push(("dx".into(), self.dx.to_string()));
        if self.dim == 2 {
            pairs.push(("dy".into(), fmt_opt(self.dy, |v| v.to_string())));
        }
        pairs.extend([
            ("dt".into(), fmt_opt(self.dt, |v| v.to_string())),
            ("t_final".into(), self.t_final.to_string()),
            ("g".into(), self.g.to_string()),
            ("potential".into(), fmt_potential(&self.potential)),
            ("initial".into(), fmt_initial(&self.initial)),
            (
                "abc".into(),
                match self.abc {
                    AbcKind::Abc11 => "abc11",
                    AbcKind::Abc10 => "abc10",
                    AbcKind::Fj => "fj",
                    AbcKind::Dirichlet => "dirichlet",
                }
                .into(),
            ),
            ("abc10_alphas".into(), fmt_opt(self.abc10_alphas, |(a, b)| format!("{a}:{b}"))),
            ("fj_order".into(), self.fj_order.to_string()),
            ("fj_velocities".into(), fmt_opt(self.fj_velocities.as_ref(), |v| fmt_list(v))),
        ]);
        for &edge in active_edges(self.dim) {
            let mode = match self.k0[edge as usize] {
                ParamMode::Adaptive => "adaptive".to_string(),
                ParamMode::Fixed(k) => k.to_string(),
            };
            pairs.push((format!("k0_{}", edge.name(self.dim)), mode));
        }
        pairs.extend([
            (
                "transform".into(),
                match self.transform {
                    Transform::Fourier => "fourier",
                    Transform::Gabor => "gabor",
                }
                .into(),
            ),
            ("p".into(), self.p.to_string()),
            (
                "window".into(),
                fmt_opt(self.window, |w| match w {
                    WindowRule::Fixed(b) => format!("fixed:{b}"),
                    WindowRule::Proportional(beta) => format!("beta:{beta}"),
                }),
            ),
            ("k_max".into(), fmt_opt(self.k_max, |v| v.to_string())),
            ("k_step".into(), fmt_opt(self.k_step, |v| v.to_string())),
            ("k_floor".into(), self.k_floor.to_string()),
            ("refresh_every".into(), self.refresh_every.to_string()),
            ("solver_tol".into(), self.solver_tol.to_string()),
            ("solver_max_iter".into(), self.solver_max_iter.to_string()),
            (
                "snapshot_times".into(),
                fmt_opt(self.snapshot_times.as_ref(), |v| if v.is_empty() { "none".into() } else { fmt_list(v) }),
            ),
            ("metrics_every".into(), fmt_opt(self.metrics_every, |v| v.to_string())),
            (
                "probes".into(),
                if self.probes.is_empty() {
                    "none".into()
                } else {
                    self.probes.iter().map(|(x, y)| format!("{x}:{y}")).collect::<Vec<_>>().join(";")
                },
            ),
            (
                "reference".into(),
                match self.reference {
                    None => "none".into(),
                    Some(Enlargement::Symmetric(f)) => format!("symmetric:{f}"),
                    Some(Enlargement::Upper(f)) => format!("upper:{f}"),
                    Some(Enlargement::Domain { x, y }) => match y {
                        Some(y) => format!("domain:{}:{}:{}:{}", x.0, x.1, y.0, y.1),
                        None => format!("domain:{}:{}", x.0, x.1),
                    },
                },
            ),
            ("output_dir".into(), self.output_dir.display().to_string()),
        ]);
        let mut out = String::new();
        for (k, v) in pairs {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("line {}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

fn parse_num(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_opt<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, String> {
    if s == "auto" {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_f).collect()
}

fn parse_fields(s: &str, min: usize, max: usize) -> Result<Vec<f64>, String> {
    let f: Vec<f64> = s.split(':').map(parse_f).collect::<Result<_, _>>()?;
    if f.len() < min || f.len() > max {
        return Err(format!("`{s}` needs {min} to {max} `:`-separated numbers"));
    }
    Ok(f)
}

fn parse_mode(s: &str) -> Result<ParamMode, String> {
    if s == "adaptive" {
        Ok(ParamMode::Adaptive)
    } else {
        parse_f(s).map(ParamMode::Fixed)
    }
}

fn parse_window(s: &str) -> Result<WindowRule, String> {
    match s.split_once(':') {
        Some(("fixed", b)) => parse_f(b).map(WindowRule::Fixed),
        Some(("beta", b)) => parse_f(b).map(WindowRule::Proportional),
        _ => Err(format!("`{s}`: expected fixed:B or beta:BETA")),
    }
}

fn parse_potential(s: &str) -> Result<Potential, String> {
    match s.split_once(':') {
        Some(("constant", c)) => parse_f(c).map(Potential::Constant),
        Some(("gaussian", rest)) => {
            let f = parse_fields(rest, 3, 4)?;
            Ok(Potential::Gaussian { amplitude: f[0], sigma: f[1], x0: f[2], y0: f.get(3).copied().unwrap_or(0.0) })
        }
        _ => Err(format!("`{s}`: expected constant:C or gaussian:AMP:SIGMA:X0[:Y0]")),
    }
}

fn parse_initial(s: &str) -> Result<InitialCondition, String> {
    if s == "zero" {
        return Ok(InitialCondition::Zero);
    }
    match s.split_once(':') {
        Some(("solitons", rest)) => rest
            .split(';')
            .map(|item| {
                let f = parse_fields(item, 3, 3)?;
                Ok(SolitonParams { amplitude: f[0], velocity: f[1], center: f[2] })
            })
            .collect::<Result<_, String>>()
            .map(InitialCondition::Solitons),
        Some(("gaussian", rest)) => {
            let f = parse_fields(rest, 4, 6)?;
            if f.len() == 5 {
                return Err("gaussian takes AMP:RATE:X0:KX or AMP:RATE:X0:KX:Y0:KY".into());
            }
            Ok(InitialCondition::Gaussian {
                amplitude: f[0],
                rate: f[1],
                x0: f[2],
                kx: f[3],
                y0: f.get(4).copied().unwrap_or(0.0),
                ky: f.get(5).copied().unwrap_or(0.0),
            })
        }
        _ => Err(format!("`{s}`: expected zero, solitons:A:B:XC[;...] or gaussian:AMP:RATE:X0:KX[:Y0:KY]")),
    }
}

fn parse_probes(s: &str) -> Result<Vec<(f64, f64)>, String> {
    if s == "none" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|item| {
            let f = parse_fields(item, 1, 2)?;
            Ok((f[0], f.get(1).copied().unwrap_or(0.0)))
        })
        .collect()
}

fn parse_reference(s: &str) -> Result<Option<Enlargement>, String> {
    if s == "none" {
        return Ok(None);
    }
    match s.split_once(':') {
        Some(("symmetric", f)) => parse_f(f).map(|f| Some(Enlargement::Symmetric(f))),
        Some(("upper", f)) => parse_f(f).map(|f| Some(Enlargement::Upper(f))),
        Some(("domain", rest)) => {
            let f = parse_fields(rest, 2, 4)?;
            match f.len() {
                2 => Ok(Some(Enlargement::Domain { x: (f[0], f[1]), y: None })),
                4 => Ok(Some(Enlargement::Domain { x: (f[0], f[1]), y: Some((f[2], f[3])) })),
                _ => Err("domain takes X_LO:X_HI[:Y_LO:Y_HI]".into()),
            }
        }
        _ => Err(format!("`{s}`: expected none, symmetric:F, upper:F or domain:...")),
    }
}

fn fmt_opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map_or_else(|| "auto".into(), f)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn fmt_potential(p: &Potential) -> String {
    match *p {
        Potential::Constant(c) => format!("constant:{c}"),
        Potential::Gaussian { amplitude, sigma, x0, y0 } => format!("gaussian:{amplitude}:{sigma}:{x0}:{y0}"),
    }
}

fn fmt_initial(i: &InitialCondition) -> String {
    match i {
        InitialCondition::Zero => "zero".into(),
        InitialCondition::Solitons(list) => format!(
            "solitons:{}",
            list.iter().map(|s| format!("{}:{}:{}", s.amplitude, s.velocity, s.center)).collect::<Vec<_>>().join(";")
        ),
        InitialCondition::Gaussian { amplitude, rate, x0, kx, y0, ky } => {
            format!("gaussian:{amplitude}:{rate}:{x0}:{kx}:{y0}:{ky}")
        }
    }
}
