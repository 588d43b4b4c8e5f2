use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{fmt_num, run, CliError, RunConfig, RunSummary};

/// Default bound on the number of runs in one sweep.
pub const MAX_RUNS: usize = 100;

/// Cross product of `key -> values` axes applied over a base configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<(String, Vec<String>)>,
    /// Lifts the [`MAX_RUNS`] bound.
    pub allow_large: bool,
}

impl SweepSpec {
    pub fn axis(mut self, key: &str, values: &[&str]) -> Self {
        self.axes.push((key.to_string(), values.iter().map(|v| v.to_string()).collect()));
        self
    }

    pub fn run_count(&self) -> usize {
        if self.axes.is_empty() {
            return 0;
        }
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Value tuples in row-major order (last axis fastest).
    pub fn combinations(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new()];
        if self.run_count() == 0 {
            return Vec::new();
        }
        for (_, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut c = prefix.clone();
                        c.push(v.clone());
                        c
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub spec: SweepSpec,
    pub cells: Vec<(Vec<String>, Result<RunSummary, String>)>,
}

impl SweepOutcome {
    fn cell(&self, values: &[String]) -> Option<&Result<RunSummary, String>> {
        self.cells.iter().find(|(v, _)| v == values).map(|(_, r)| r)
    }

    fn final_pair(&self, values: &[String]) -> (String, String) {
        match self.cell(values) {
            Some(Ok(s)) if s.failure.is_none() => (s.e1.map_or_else(String::new, fmt_num), fmt_num(s.r)),
            _ => ("FAILED".into(), "FAILED".into()),
        }
    }
}

fn worker_count() -> usize {
    std::env::var("SLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn run_dir_name(keys: &[(String, Vec<String>)], values: &[String]) -> String {
    let mut name = String::from("run");
    for ((k, _), v) in keys.iter().zip(values) {
        let v: String = v.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect();
        let _ = write!(name, "_{k}-{v}");
    }
    name
}

/// Runs every combination, each in its own subdirectory of `out`, and writes
/// `out/sweep.csv` with one row per run. Failing runs become FAILED cells.
pub fn sweep(spec: &SweepSpec, base: &RunConfig, out: &Path) -> Result<SweepOutcome, CliError> {
    let runs = spec.run_count();
    if runs > MAX_RUNS && !spec.allow_large {
        return Err(CliError::TooLarge { runs, limit: MAX_RUNS });
    }
    let combos = spec.combinations();
    // Reject bad keys or values before spending time on any run.
    let mut configs = Vec::with_capacity(combos.len());
    for values in &combos {
        let mut cfg = base.clone();
        for ((key, _), v) in spec.axes.iter().zip(values) {
            cfg.set(key, v)?;
        }
        cfg.output_dir = out.join(run_dir_name(&spec.axes, values));
        configs.push(cfg);
    }
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| CliError::Parse(format!("thread pool: {e}")))?;
    let results: Vec<Result<RunSummary, String>> =
        pool.install(|| configs.par_iter().map(|cfg| run(cfg).map_err(|e| e.to_string())).collect());
    let outcome = SweepOutcome { spec: spec.clone(), cells: combos.into_iter().zip(results).collect() };

    let mut csv = String::new();
    for (k, _) in &spec.axes {
        let _ = write!(csv, "{k},");
    }
    csv.push_str("E1,r,status\n");
    for (values, res) in &outcome.cells {
        for v in values {
            let _ = write!(csv, "{v},");
        }
        let (e1, r) = outcome.final_pair(values);
        let status = match res {
            Ok(s) if s.failure.is_none() => "ok",
            _ => "FAILED",
        };
        let _ = writeln!(csv, "{e1},{r},{status}");
    }
    let path = out.join("sweep.csv");
    fs::write(&path, csv).map_err(|e| CliError::io(path, e))?;
    Ok(outcome)
}

/// The three published parameter studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Adaptive runs: weight exponent `p` by transform and mesh.
    Adaptive,
    /// Fixed right-side wave number by mesh.
    Fixed,
    /// Window proportional to the estimate: `beta` by mesh.
    Window,
}

impl TableKind {
    pub const ALL: [TableKind; 3] = [TableKind::Adaptive, TableKind::Fixed, TableKind::Window];

    pub fn file_name(self) -> &'static str {
        match self {
            TableKind::Adaptive => "table1.csv",
            TableKind::Fixed => "table2.csv",
            TableKind::Window => "table3.csv",
        }
    }

    /// Row axis, then the column axes (mesh last).
    fn spec(self, dx_list: &[String]) -> SweepSpec {
        let dx: Vec<&str> = dx_list.iter().map(String::as_str).collect();
        let s = SweepSpec::default();
        match self {
            TableKind::Adaptive => {
                s.axis("p", &["1", "2", "3", "4", "5"]).axis("transform", &["fourier", "gabor"]).axis("dx", &dx)
            }
            TableKind::Fixed => s.axis("k0_right", &["2", "3.5", "5"]).axis("dx", &dx),
            TableKind::Window => {
                s.axis("window", &["beta:0.5", "beta:1", "beta:2", "beta:3", "beta:4"]).axis("dx", &dx)
            }
        }
    }

    fn row_label(self) -> &'static str {
        match self {
            TableKind::Adaptive => "p",
            TableKind::Fixed => "k0",
            TableKind::Window => "beta",
        }
    }
}

/// Sweeps one table over `dx_list` starting from `base` and writes it to
/// `out/<table>.csv`: one row per swept value, an `E1`/`r` column pair per
/// remaining combination (transform and mesh).
pub fn tables(kind: TableKind, base: &RunConfig, dx_list: &[String], out: &Path) -> Result<PathBuf, CliError> {
    let spec = kind.spec(dx_list);
    let dir = out.join(kind.file_name().trim_end_matches(".csv"));
    let outcome = sweep(&spec, base, &dir)?;

    let (row_key, rows) = &spec.axes[0];
    let col_axes = SweepSpec { axes: spec.axes[1..].to_vec(), allow_large: true };
    let columns = col_axes.combinations();
    let label = |values: &[String]| {
        col_axes
            .axes
            .iter()
            .zip(values)
            .map(|((k, _), v)| if k == "dx" { format!("dx{v}") } else { v.clone() })
            .collect::<Vec<_>>()
            .join("_")
    };
    let mut csv = String::from(kind.row_label());
    for c in &columns {
        let l = label(c);
        let _ = write!(csv, ",E1_{l},r_{l}");
    }
    csv.push('\n');
    if !columns.is_empty() {
        for row in rows {
            let shown = if row_key == "window" { row.trim_start_matches("beta:") } else { row };
            csv.push_str(shown);
            for c in &columns {
                let mut values = vec![row.clone()];
                values.extend(c.iter().cloned());
                let (e1, r) = outcome.final_pair(&values);
                let _ = write!(csv, ",{e1},{r}");
            }
            csv.push('\n');
        }
    }
    let path = out.join(kind.file_name());
    fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
