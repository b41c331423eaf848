//! Simulation kit for clock-conditioned quantum dynamics on an energy shell.
//!
//! A stationary global state on the joint Hilbert space of a large "clock"
//! environment and a small system is sampled at random inside a narrow energy
//! shell. Conditioning that single stationary state on the clock reading
//! produces unitary-looking dynamics for the system, while tracing the clock
//! out produces a canonical thermal state; this crate makes both statements
//! numerically exact and testable.
//!
//! Module map:
//! - [`spectra`]: integer-grid clock spectra (rational-ratio and exponential
//!   density builders) and system level lists.
//! - [`timegrid`]: clock time states, discrete resolution of the identity,
//!   anti-aliasing bounds, orthogonality diagnostics.
//! - [`universe`]: energy-shell support sets, random and sharp global states,
//!   CSV round-tripping.
//! - [`dynamics`]: closed-form relative states, norm curves, fidelity to
//!   unitary evolution, and the nonlocal correction kernel.
//! - [`thermo`]: reduced density matrices, time averages, the canonical
//!   target, trace distance, and the typicality census.
//! - [`toymodel`]: the two-level oscillator demonstration with a
//!   triple-checked position expectation value.
//! - [`gppt`]: conditional single- and two-time measurement probabilities via
//!   external-time averaging.
//!
//! Conventions: `hbar = 1` everywhere; clock energies sit on the grid
//! `2 pi r_i / T` with integer `r_i`, which lets every grid-sampled phase be
//! reduced in exact integer arithmetic before touching floating point. That
//! is what makes the identity-resolution, time-average, and probability
//! theorems hold to near machine precision rather than quadrature accuracy.

pub mod dynamics;
pub mod error;
pub mod gppt;
pub mod numeric;
pub mod spectra;
pub mod thermo;
pub mod timegrid;
pub mod toymodel;
pub mod universe;

pub use error::{Error, Result};
pub use spectra::{
    build_exponential_clock, entropy_and_beta, quantize_rational_spectrum, ClockSpectrum,
    SpectrumSource, SystemSpectrum, ThermalParams,
};
pub use timegrid::{
    apply_frame, identity_residual, orthogonality_integral, overlap, time_state, TimeGrid,
    TimeState,
};
pub use universe::{
    read_universe_csv, sample_universe, sharp_universe, support_sets, write_universe_csv,
    EnergyShell, UniverseState,
};
pub use dynamics::{
    conditioned_direct, conditioned_on_grid, nonlocal_residual, norm_at, norm_curve,
    relative_state, schrodinger_fidelity, NonlocalKernel, RelativeState,
};
pub use thermo::{
    gibbs_state, reduced_density_matrix, shell_mixed_reduced, time_average_density_matrix,
    trace_distance, typicality_census, CensusReport, CensusSample, DensityMatrix,
};
pub use toymodel::{
    oscillator_sharp_universe, oscillator_universe, position_expectation, position_first_order,
    toy_time_average, OscillatorConfig,
};
pub use gppt::{single_time_probability, two_time_probability, MeasurementEffect};
