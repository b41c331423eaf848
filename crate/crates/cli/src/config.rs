//! Run configuration: a single JSON document that fully determines a run.

use serde::{Deserialize, Serialize};

use chronoshell::spectra::{build_exponential_clock, quantize_rational_spectrum};
use chronoshell::{ClockSpectrum, SystemSpectrum};

use crate::RunError;

/// Clock construction recipe.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClockConfig {
    /// Levels given as exact rational multiples of the first excited energy.
    Rational { ratios: Vec<(u64, u64)>, e1: f64 },
    /// Exponential density of states, rounded to the period grid.
    Exponential {
        beta: f64,
        nu0: f64,
        top_level: usize,
        period: f64,
    },
    /// Integer grid indices given directly.
    Explicit { grid_indices: Vec<u64>, period: f64 },
}

impl ClockConfig {
    pub fn build(&self) -> Result<ClockSpectrum, RunError> {
        let clock = match self {
            ClockConfig::Rational { ratios, e1 } => quantize_rational_spectrum(ratios, *e1),
            ClockConfig::Exponential {
                beta,
                nu0,
                top_level,
                period,
            } => build_exponential_clock(*beta, *nu0, *top_level, *period),
            ClockConfig::Explicit {
                grid_indices,
                period,
            } => ClockSpectrum::from_grid_indices(grid_indices.clone(), *period),
        };
        clock.map_err(|e| RunError::Config(format!("clock: {e}")))
    }
}

/// Energy shell placement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShellConfig {
    pub energy: f64,
    pub delta: f64,
}

/// Time grid; omitted fields fall back to the critical grid at `t0 = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(default)]
    pub t0: f64,
    pub samples: usize,
}

/// Census workload.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CensusConfig {
    pub samples: usize,
    pub beta_ref: f64,
}

/// Uniform time sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl SweepConfig {
    pub fn times(&self) -> Result<Vec<f64>, RunError> {
        if self.steps < 2 || !(self.t_end > self.t_start) {
            return Err(RunError::Config(format!(
                "sweep: need steps >= 2 and t_end > t_start, got steps={} range=[{}, {}]",
                self.steps, self.t_start, self.t_end
            )));
        }
        let dt = (self.t_end - self.t_start) / (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|k| self.t_start + k as f64 * dt)
            .collect())
    }
}

/// Oscillator parameters for the `toy` subcommand.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OscillatorSection {
    pub mass: f64,
    pub omega: f64,
    #[serde(default)]
    pub ground_energy: f64,
}

/// Probe times for the `gppt` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub times: Vec<f64>,
    /// External-time grid; defaults to the smallest resolving grid.
    #[serde(default)]
    pub theta_steps: Option<usize>,
}

/// Everything a run depends on. A run is a pure function of this value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub clock: ClockConfig,
    #[serde(default)]
    pub system_levels: Vec<f64>,
    #[serde(default)]
    pub shell: Option<ShellConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub census: Option<CensusConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub oscillator: Option<OscillatorSection>,
    #[serde(default)]
    pub probes: Option<ProbeConfig>,
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, RunError> {
        let bytes = std::fs::read(path)
            .map_err(|e| RunError::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| RunError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn system(&self) -> Result<SystemSpectrum, RunError> {
        SystemSpectrum::new(self.system_levels.clone())
            .map_err(|e| RunError::Config(format!("system_levels: {e}")))
    }

    pub fn shell_section(&self) -> Result<ShellConfig, RunError> {
        self.shell
            .ok_or_else(|| RunError::Config("missing `shell` section".into()))
    }

    pub fn sweep_section(&self) -> Result<SweepConfig, RunError> {
        self.sweep
            .ok_or_else(|| RunError::Config("missing `sweep` section".into()))
    }
}
