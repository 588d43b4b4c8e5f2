//! Command-line front end: configuration files, presets, single runs with
//! CSV output, and parameter sweeps.

mod config;
mod run;
mod sweep;

use std::path::PathBuf;

pub use config::{AbcKind, Preset, RunConfig};
pub use run::{run, RunSummary, FAILED_MARKER, MANIFEST};
pub use sweep::{sweep, tables, SweepOutcome, SweepSpec, TableKind, MAX_RUNS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for key `{key}`: {message}")]
    Key { key: String, message: String },
    #[error("config: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("run failed: {0}")]
    Run(#[from] crate::slab::SlabError),
    #[error("sweep of {runs} runs exceeds the limit of {limit}; pass --allow-large to override")]
    TooLarge { runs: usize, limit: usize },
}

impl CliError {
    pub(crate) fn key(key: &str, message: impl Into<String>) -> Self {
        CliError::Key { key: key.to_string(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// True for problems found before any simulation started.
    pub fn is_config(&self) -> bool {
        matches!(self, CliError::Key { .. } | CliError::Parse(_) | CliError::TooLarge { .. })
    }
}

/// Formats a number with 17 significant digits, locale independent.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}
