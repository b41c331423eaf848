//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ratio {a}/{d} is not in lowest terms; divide both by gcd {g} first")]
    NonCoprimeRatio { a: u64, d: u64, g: u64 },
    #[error("ratio at position {index} duplicates an earlier level (degenerate spectrum)")]
    DuplicateRatio { index: usize },
    #[error("ratios must be strictly increasing; violation at position {index}")]
    NonIncreasingRatio { index: usize },
    #[error("at least one ratio is required to build a clock")]
    NoRatios,
    #[error("integer grid index overflows u64 (lcm of denominators too large)")]
    GridOverflow,
    #[error("spectrum parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("time grid of period {period:.6e} too coarse for the requested level density; need period >= {required_period:.6e}")]
    GridTooCoarse { period: f64, required_period: f64 },
    #[error("no clock levels in energy window [{lo:.6e}, {hi:.6e})")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("system levels must be strictly increasing")]
    NonIncreasingLevels,
    #[error("shell width {delta:.6e} not below the system gap {min_gap:.6e}; support windows would collide")]
    WindowOverlap { delta: f64, min_gap: f64 },
    #[error("every support window is empty; shell holds no states")]
    EmptyShell,
    #[error("support window for system level {level} is empty")]
    EmptyLevelWindow { level: usize },
    #[error("no clock level resonant with E - E_{level} on the integer grid")]
    NoResonantLevel { level: usize },
    #[error("time grid with {samples} samples aliases the clock; need at least {required}")]
    AliasedGrid { samples: usize, required: usize },
    #[error("relative state has vanishing norm; fidelity undefined")]
    ZeroNormState,
    #[error("density matrix dimensions differ: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("operation requires a system with {expected} levels, got {got}")]
    WrongSystemDimension { expected: usize, got: usize },
    #[error("clock never conditions on the requested time (denominator {value:.3e} below threshold)")]
    UnconditionedTime { value: f64 },
    #[error("first measurement has zero probability; conditional undefined")]
    UndefinedConditional,
    #[error("operation requires a sharp (delta = 0) universe")]
    SharpUniverseRequired,
    #[error("operation requires a harmonic clock (grid indices 0..p)")]
    HarmonicClockRequired,
    #[error("record ({clock_level}, {system_level}) lies outside the shell support")]
    OffSupportRecord {
        clock_level: usize,
        system_level: usize,
    },
    #[error("malformed universe record: {0}")]
    MalformedRecord(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
