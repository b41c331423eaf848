//! Experiment driver for the `chronoshell` library: subcommands for the
//! identity/orthogonality checks, the typicality census, dynamics sweeps, the
//! oscillator demonstration, conditional-probability tables, and the
//! minimum-energy-step bound. Every run is a pure function of its config and
//! seed; artifacts are CSV/JSON plus a manifest with content hashes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod manifest;

pub use config::RunConfig;

/// Reduced Planck constant in J s, used only by the SI-facing bound.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Run failure, carrying the process exit code contract: invalid
/// configuration exits 2, a failed in-run invariant exits 1.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Invariant(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "invalid config: {msg}"),
            RunError::Invariant(msg) => write!(f, "invariant failed: {msg}"),
            RunError::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Invariant(_) | RunError::Io(_) => 1,
        }
    }
}

/// `2 pi hbar / T`: the smallest energy spacing a clock of total duration
/// `T` seconds can carry.
pub fn cosmo_bound(t_universe_s: f64) -> Result<f64, RunError> {
    if !(t_universe_s > 0.0) || !t_universe_s.is_finite() {
        return Err(RunError::Config(format!(
            "T must be a positive duration in seconds, got {t_universe_s}"
        )));
    }
    Ok(std::f64::consts::TAU * HBAR_SI / t_universe_s)
}

#[derive(Debug, Parser)]
#[command(name = "chronoshell", version, about = "clock-conditioned dynamics studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts and the manifest.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame-identity and orthogonality residuals for a clock and grid.
    IdentityCheck(CommonArgs),
    /// Census of reduced states of random shell universes.
    Typicality(CommonArgs),
    /// Norm, fidelity, and evolution-equation residual along a time sweep.
    Dynamics(CommonArgs),
    /// Two-level oscillator position curves.
    Toy(CommonArgs),
    /// Clock-conditioned outcome probability tables.
    Gppt(CommonArgs),
    /// Minimum energy step for a clock running for --T seconds.
    Cosmo {
        /// Total duration in seconds.
        #[arg(long = "T")]
        t_universe: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(args: &CommonArgs) -> Result<RunConfig, RunError> {
    let mut config = RunConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<(), RunError> {
    match &cli.command {
        Command::IdentityCheck(args) => commands::identity_check(&load(args)?, &args.out),
        Command::Typicality(args) => commands::typicality(&load(args)?, &args.out),
        Command::Dynamics(args) => commands::dynamics(&load(args)?, &args.out),
        Command::Toy(args) => commands::toy(&load(args)?, &args.out),
        Command::Gppt(args) => commands::gppt(&load(args)?, &args.out),
        Command::Cosmo { t_universe, out } => commands::cosmo(*t_universe, out),
    }
}
