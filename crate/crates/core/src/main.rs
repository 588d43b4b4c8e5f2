use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slab_core::cli::{self, CliError, Preset, RunConfig, SweepSpec, TableKind};
use slab_core::slab::ParamMode;

#[derive(Parser)]
#[command(name = "slab", version, about = "Absorbing-boundary Schrodinger solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write CSV outputs.
    Run(Common),
    /// Run the cross product of `--axis key=v1,v2,...` values.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long = "axis", value_name = "KEY=V1,V2,...")]
        axes: Vec<String>,
        /// Allow more than 100 runs.
        #[arg(long)]
        allow_large: bool,
    },
    /// Regenerate the parameter-study tables (defaults to the example1 preset).
    Tables {
        #[command(flatten)]
        common: Common,
        /// 1, 2, 3 or all.
        #[arg(long, default_value = "all")]
        table: String,
        #[arg(long, value_delimiter = ',', default_values_t = ["0.1".to_string(), "0.05".to_string()])]
        dx_list: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, value_parser = ["fourier", "gabor"])]
    transform: Option<String>,
    #[arg(long, conflicts_with = "window_fixed")]
    window_beta: Option<String>,
    #[arg(long)]
    window_fixed: Option<String>,
    #[arg(long, value_parser = ["abc10", "abc11", "fj", "dirichlet"])]
    abc: Option<String>,
    /// Wave number for the sides that would otherwise be adaptive.
    #[arg(long, requires = "fixed")]
    k0: Option<f64>,
    #[arg(long, requires = "k0")]
    fixed: bool,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any configuration key, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    /// Preset, then file, then flags.
    fn resolve(&self, default_preset: Preset) -> Result<RunConfig, CliError> {
        let text = match &self.config {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?),
            None => None,
        };
        let mut cfg = match (&self.preset, &text) {
            (Some(p), _) => RunConfig::preset(p.parse().map_err(|m| CliError::Key { key: "preset".into(), message: m })?),
            (None, Some(t)) => RunConfig::from_text(t)?,
            (None, None) => RunConfig::preset(default_preset),
        };
        if let (Some(_), Some(t)) = (&self.preset, &text) {
            cfg.apply_text(t)?;
        }
        let flags = [
            ("dx", &self.dx),
            ("dt", &self.dt),
            ("p", &self.p),
            ("transform", &self.transform),
            ("abc", &self.abc),
            ("t_final", &self.t_final),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(b) = &self.window_beta {
            cfg.set("window", &format!("beta:{b}"))?;
        }
        if let Some(b) = &self.window_fixed {
            cfg.set("window", &format!("fixed:{b}"))?;
        }
        if let (Some(k), true) = (self.k0, self.fixed) {
            for mode in cfg.k0.iter_mut().filter(|m| **m == ParamMode::Adaptive) {
                *mode = ParamMode::Fixed(k);
            }
        }
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("--set expects KEY=VALUE, got `{item}`")))?;
            cfg.set(k.trim(), v)?;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn parse_axis(text: &str) -> Result<(String, Vec<String>), CliError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("--axis expects KEY=V1,V2,..., got `{text}`")))?;
    let values = v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    Ok((k.trim().to_string(), values))
}

fn execute(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Run(common) => {
            let cfg = common.resolve(Preset::Custom)?;
            let summary = cli::run(&cfg)?;
            let e1 = summary.e1.map_or_else(|| "n/a".to_string(), |e| format!("{e:.6e}"));
            println!("t = {}  r = {:.6e}  E1 = {e1}  ({} steps)", summary.t_end, summary.r, summary.steps);
            if let Some(f) = summary.failure {
                eprintln!("error: step failure: {f}");
                return Ok(false);
            }
            println!("outputs in {}", cfg.output_dir.display());
            Ok(true)
        }
        Command::Sweep { common, axes, allow_large } => {
            let base = common.resolve(Preset::Custom)?;
            let spec = SweepSpec { axes: axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?, allow_large };
            let outcome = cli::sweep(&spec, &base, &base.output_dir)?;
            let failed = outcome.cells.iter().filter(|(_, r)| !matches!(r, Ok(s) if s.failure.is_none())).count();
            println!("{} runs, {failed} failed; see {}", outcome.cells.len(), base.output_dir.join("sweep.csv").display());
            Ok(true)
        }
        Command::Tables { common, table, dx_list } => {
            let base = common.resolve(Preset::Example1)?;
            let kinds: Vec<TableKind> = match table.as_str() {
                "all" => TableKind::ALL.to_vec(),
                "1" => vec![TableKind::Adaptive],
                "2" => vec![TableKind::Fixed],
                "3" => vec![TableKind::Window],
                other => return Err(CliError::Parse(format!("--table: unknown table `{other}`"))),
            };
            for kind in kinds {
                let path = cli::tables(kind, &base, &dx_list, &base.output_dir)?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
