//! Command-line front end: phase diagram tables, relaxation campaigns,
//! Jacobian spectra and 1D Riemann problems, all written as CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Config, ConfigError};

#[derive(Parser, Debug)]
#[command(
    name = "vdw-relax",
    version,
    about = "Van der Waals liquid-vapor relaxation toolkit"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isotherms, spinodal curve, saturation dome and zone raster.
    PhaseDiagram {
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
    /// Integrate the fraction dynamics for one mixture state.
    Relax {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Jacobian spectrum at the equilibria of a list of mixture states.
    Eigen {
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
    /// Riemann problem for the homogeneous relaxation model.
    Euler {
        #[arg(long, short)]
        config: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(vdw_relax::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<vdw_relax::Error> for CliError {
    fn from(e: vdw_relax::Error) -> Self {
        match e {
            vdw_relax::Error::Config(m) => CliError::Config(m),
            e @ vdw_relax::Error::InvalidParams(_) => CliError::Config(e.to_string()),
            e => CliError::Numerical(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn load(path: Option<&PathBuf>, command: &str) -> Result<Config, CliError> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    cfg.check_command(command)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, path) = match &cli.command {
        Command::PhaseDiagram { config } => ("phase-diagram", config.as_ref()),
        Command::Relax { config } => ("relax", Some(config)),
        Command::Eigen { config } => ("eigen", config.as_ref()),
        Command::Euler { config } => ("euler", Some(config)),
    };
    let mut cfg = load(path, name)?;
    let from_cfg: Option<String> = cfg.take("output_dir")?;
    let out = cli
        .out
        .clone()
        .or(from_cfg.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    match cli.command {
        Command::PhaseDiagram { .. } => commands::phase_diagram(cfg, &out),
        Command::Relax { .. } => commands::relax(cfg, &out, cli.seed),
        Command::Eigen { .. } => commands::eigen(cfg, &out),
        Command::Euler { .. } => commands::euler(cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
