use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::grid::GridSpec;
use crate::metrics::{l1_distance, l1_error, reference_run, reflection_ratio, soliton_superposition, ReferenceSolution};
use crate::slab::{active_edges, simulate_partial, steps_to, InitialCondition, Simulation};

use super::{fmt_num, CliError, RunConfig};

pub const MANIFEST: &str = "run_manifest";
pub const FAILED_MARKER: &str = "FAILED";

/// Final-time numbers of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t_end: f64,
    pub r: f64,
    /// Absent when there is neither an exact solution nor a reference run.
    pub e1: Option<f64>,
    /// Error text when the run stopped before `t_final`.
    pub failure: Option<String>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn field_csv(grid: &GridSpec, psi: &[num_complex::Complex64]) -> String {
    let mut out = String::with_capacity(psi.len() * 90);
    out.push_str(if grid.dim() == 2 { "x,y,re,im,abs\n" } else { "x,re,im,abs\n" });
    for (id, z) in psi.iter().enumerate() {
        let (i, j) = grid.coords_of(id);
        let _ = write!(out, "{},", fmt_num(grid.x_at(i)));
        if grid.dim() == 2 {
            let _ = write!(out, "{},", fmt_num(grid.y_at(j)));
        }
        let _ = writeln!(out, "{},{},{}", fmt_num(z.re), fmt_num(z.im), fmt_num(z.norm()));
    }
    out
}

/// Exact-solution or reference error at the simulation's current time.
struct ErrorSource {
    exact: Option<Box<dyn Fn(f64, f64) -> num_complex::Complex64>>,
    reference: Option<ReferenceSolution>,
}

impl ErrorSource {
    fn e1(&self, sim: &Simulation) -> Option<f64> {
        let t = sim.time();
        let psi = &sim.field().current;
        if let Some(exact) = &self.exact {
            return Some(l1_error(psi, &sim.config().grid, |x, _| exact(x, t)));
        }
        let snap = self.reference.as_ref()?.at(t)?;
        l1_distance(psi, snap).ok()
    }
}

/// Runs one resolved-or-not configuration and writes its outputs into
/// `cfg.output_dir`. Configuration problems are returned before anything is
/// written; a step failure still writes the partial outputs, an empty
/// FAILED marker, and is reported through [`RunSummary::failure`].
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let cfg = cfg.resolve()?;
    let sim_cfg = cfg.sim_config()?;
    let dt = sim_cfg.grid.dt;
    let dim = sim_cfg.grid.dim();
    let total = steps_to(cfg.t_final, dt)?;
    let every = cfg.metrics_every.unwrap_or(1);
    let record = |n: usize| n % every == 0 || n == total;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let marker = dir.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    write(&dir.join(MANIFEST), &cfg.to_text())?;

    let mut snapshots: BTreeMap<usize, f64> = BTreeMap::new();
    for &t in cfg.snapshot_times.as_deref().unwrap_or(&[]) {
        snapshots.entry(steps_to(t, dt)?).or_insert(t);
    }

    let exact: Option<Box<dyn Fn(f64, f64) -> num_complex::Complex64>> = match &cfg.initial {
        InitialCondition::Solitons(list) if cfg.reference.is_none() => {
            let f = soliton_superposition(list, cfg.g).map_err(|e| CliError::key("initial", e.to_string()))?;
            Some(Box::new(f))
        }
        _ => None,
    };
    let reference = match cfg.reference {
        Some(enlargement) => {
            let times: Vec<f64> = (0..=total).filter(|&n| record(n)).map(|n| n as f64 * dt).collect();
            Some(reference_run(&sim_cfg, enlargement, cfg.t_final, &times).map_err(|e| match e {
                crate::slab::SlabError::Metrics(m) => CliError::key("reference", m.to_string()),
                other => CliError::Run(other),
            })?)
        }
        None => None,
    };
    let errors = ErrorSource { exact, reference };

    let grid = sim_cfg.grid;
    let probe_ids: Vec<(f64, f64, usize)> = cfg
        .probes
        .iter()
        .map(|&(x, y)| {
            let i = grid.x.nearest_index(x);
            let j = grid.y.map_or(0, |a| a.nearest_index(y));
            (grid.x_at(i), if dim == 2 { grid.y_at(j) } else { 0.0 }, grid.id(i, j))
        })
        .collect();

    let edges = active_edges(dim);
    let mut metrics = String::from("t,r,E1");
    for &e in edges {
        let _ = write!(metrics, ",k0_{}", e.name(dim));
    }
    metrics.push_str(",solver_iters\n");
    let mut probes = String::from("t,x,y,re,im,abs,ref_re,ref_im,ref_abs\n");
    let mut initial: Vec<num_complex::Complex64> = Vec::new();
    let mut last = (0usize, 0.0, 1.0, None);
    let mut io_error: Option<CliError> = None;

    let mut observe = |sim: &Simulation, diag: Option<&crate::slab::StepDiagnostics>| {
        let n = sim.step_index();
        let psi = &sim.field().current;
        if n == 0 {
            initial = psi.clone();
        }
        let t = sim.time();
        let r = reflection_ratio(psi, &initial).unwrap_or(f64::NAN);
        let e1 = errors.e1(sim);
        last = (n, t, r, e1);
        if let Some(&label) = snapshots.get(&n) {
            let path = dir.join(format!("field_{label}.csv"));
            if let Err(e) = write(&path, &field_csv(&grid, psi)) {
                io_error.get_or_insert(e);
            }
        }
        if !record(n) {
            return;
        }
        let k0 = diag.map_or_else(|| sim.k0_summary(), |d| d.k0);
        let _ = write!(metrics, "{},{},{}", fmt_num(t), fmt_num(r), fmt_num(e1.unwrap_or(f64::NAN)));
        for &e in edges {
            let _ = write!(metrics, ",{}", fmt_num(k0[e as usize].unwrap_or(f64::NAN)));
        }
        let _ = writeln!(metrics, ",{}", diag.map_or(0, |d| d.solve.iterations));
        for &(x, y, id) in &probe_ids {
            let z = psi[id];
            let rz = errors.reference.as_ref().and_then(|rf| rf.at(t)).map(|s| s[id]);
            let _ = writeln!(
                probes,
                "{},{},{},{},{},{},{},{},{}",
                fmt_num(t),
                fmt_num(x),
                fmt_num(y),
                fmt_num(z.re),
                fmt_num(z.im),
                fmt_num(z.norm()),
                fmt_num(rz.map_or(f64::NAN, |v| v.re)),
                fmt_num(rz.map_or(f64::NAN, |v| v.im)),
                fmt_num(rz.map_or(f64::NAN, |v| v.norm())),
            );
        }
    };
    let outcome = simulate_partial(sim_cfg, cfg.t_final, &mut observe);

    write(&dir.join("metrics.csv"), &metrics)?;
    if !probe_ids.is_empty() {
        write(&dir.join("probes.csv"), &probes)?;
    }
    if let Some(e) = io_error {
        return Err(e);
    }
    let (steps, t_end, r, e1) = last;
    match outcome {
        Ok(_) => Ok(RunSummary { steps, t_end, r, e1, failure: None }),
        Err(f) if f.simulation.is_none() => Err(CliError::Run(f.error)),
        Err(f) => {
            write(&marker, "")?;
            Ok(RunSummary { steps, t_end, r, e1, failure: Some(f.error.to_string()) })
        }
    }
}
