//! Harmonic-oscillator demonstration: two-level dynamics inside a thermal
//! environment, with the position expectation value evaluated along three
//! independent routes and its first-order short-time expansion.

use num_complex::Complex64;

use crate::dynamics::relative_state;
use crate::error::{Error, Result};
use crate::numeric::TAU;
use crate::spectra::{ClockSpectrum, SystemSpectrum};
use crate::thermo::{time_average_density_matrix, DensityMatrix};
use crate::timegrid::TimeGrid;
use crate::universe::{sample_universe, sharp_universe, support_sets, UniverseState};

/// One-dimensional oscillator with only its two lowest levels populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    mass: f64,
    omega: f64,
    ground_energy: f64,
}

impl OscillatorConfig {
    pub fn new(mass: f64, omega: f64, ground_energy: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "oscillator mass must be positive, got {mass}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "oscillator frequency must be positive, got {omega}"
            )));
        }
        Ok(Self {
            mass,
            omega,
            ground_energy,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// The two populated levels, gap exactly `omega`.
    pub fn levels(&self) -> SystemSpectrum {
        SystemSpectrum::new(vec![self.ground_energy, self.ground_energy + self.omega])
            .expect("omega > 0 guarantees increasing levels")
    }

    /// Prefactor `sqrt(2 / (m omega))` of the oscillation.
    pub fn x_amplitude(&self) -> f64 {
        (2.0 / (self.mass * self.omega)).sqrt()
    }

    /// Ground-to-first matrix element `sqrt(1 / (2 m omega))`.
    pub fn x_element(&self) -> f64 {
        (0.5 / (self.mass * self.omega)).sqrt()
    }

    /// Whether `omega` is an integer multiple of `2 pi / period`, which makes
    /// period averages of the oscillation vanish exactly.
    pub fn is_on_grid(&self, period: f64) -> bool {
        let cycles = self.omega * period / TAU;
        (cycles - cycles.round()).abs() <= 1e-9 * (1.0 + cycles.abs())
    }

    /// Copy with `omega` snapped to the nearest multiple of `2 pi / period`.
    pub fn snapped_to_grid(&self, period: f64) -> Result<Self> {
        let cycles = (self.omega * period / TAU).round();
        if cycles < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "omega {} is below the grid step 2 pi / {period}",
                self.omega
            )));
        }
        Self::new(self.mass, cycles * TAU / period, self.ground_energy)
    }
}

fn require_two_levels(universe: &UniverseState) -> Result<()> {
    let d = universe.shell().system_dim();
    if d != 2 {
        return Err(Error::WrongSystemDimension {
            expected: 2,
            got: d,
        });
    }
    Ok(())
}

/// Random universe on the shell of the two oscillator levels.
pub fn oscillator_universe(
    clock: &ClockSpectrum,
    osc: &OscillatorConfig,
    energy: f64,
    delta: f64,
    seed: u64,
) -> Result<UniverseState> {
    let shell = support_sets(clock, &osc.levels(), energy, delta)?;
    if shell.window(0).is_empty() || shell.window(1).is_empty() {
        let level = if shell.window(0).is_empty() { 0 } else { 1 };
        return Err(Error::EmptyLevelWindow { level });
    }
    Ok(sample_universe(&shell, seed))
}

/// Sharp (zero-width) oscillator universe with chosen level amplitudes.
pub fn oscillator_sharp_universe(
    clock: &ClockSpectrum,
    osc: &OscillatorConfig,
    energy: f64,
    amplitudes: &[Complex64],
) -> Result<UniverseState> {
    sharp_universe(clock, &osc.levels(), energy, amplitudes)
}

/// Position expectation by the explicit double sum over the two support
/// windows: `sqrt(2/m omega) sum_{i,k} |c_i0||c_k1|
/// cos((omega + D_i0 - D_k1) t - dphi_ik)`.
pub fn position_expectation(
    universe: &UniverseState,
    osc: &OscillatorConfig,
    t: f64,
) -> Result<f64> {
    require_two_levels(universe)?;
    let shell = universe.shell();
    let mut sum = 0.0;
    for (c0, &d0) in universe.coeffs(0).iter().zip(shell.detunings(0)) {
        for (c1, &d1) in universe.coeffs(1).iter().zip(shell.detunings(1)) {
            let dphi = c1.arg() - c0.arg();
            sum += c0.norm() * c1.norm() * ((osc.omega + d0 - d1) * t - dphi).cos();
        }
    }
    Ok(osc.x_amplitude() * sum)
}

/// Same observable through the envelope form
/// `sqrt(2/m omega) |alpha_0||alpha_1| cos(omega t - dphi(t))`.
pub fn position_alpha_form(universe: &UniverseState, osc: &OscillatorConfig, t: f64) -> Result<f64> {
    require_two_levels(universe)?;
    let state = relative_state(universe, t);
    let a0 = state.alpha[0];
    let a1 = state.alpha[1];
    let dphi = a1.arg() - a0.arg();
    Ok(osc.x_amplitude() * a0.norm() * a1.norm() * (osc.omega * t - dphi).cos())
}

/// Same observable as the matrix element of the position operator truncated
/// to the three lowest levels; the populated state has no weight on the third
/// level but the `sqrt(2)` element is kept so the operator is faithful.
pub fn position_matrix_element(
    universe: &UniverseState,
    osc: &OscillatorConfig,
    t: f64,
) -> Result<f64> {
    require_two_levels(universe)?;
    let state = relative_state(universe, t);
    let x01 = osc.x_element();
    let x12 = std::f64::consts::SQRT_2 * x01;
    let phi = [state.amplitudes[0], state.amplitudes[1], Complex64::ZERO];
    // (X phi)_a for the tridiagonal truncation
    let xphi = [
        x01 * phi[1],
        x01 * phi[0] + x12 * phi[2],
        x12 * phi[1],
    ];
    let val: Complex64 = phi
        .iter()
        .zip(&xphi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(val.re)
}

/// Position expectation divided by the squared norm of the relative state.
pub fn position_expectation_normalized(
    universe: &UniverseState,
    osc: &OscillatorConfig,
    t: f64,
) -> Result<f64> {
    let raw = position_expectation(universe, osc, t)?;
    let n = relative_state(universe, t).norm_sqr();
    if n <= 1e-150 {
        return Err(Error::ZeroNormState);
    }
    Ok(raw / n)
}

/// First-order short-time expansion of the double-sum form around `t = 0`.
pub fn position_first_order(
    universe: &UniverseState,
    osc: &OscillatorConfig,
    t: f64,
) -> Result<f64> {
    require_two_levels(universe)?;
    let shell = universe.shell();
    let mut leading = 0.0;
    let mut correction = 0.0;
    for (c0, &d0) in universe.coeffs(0).iter().zip(shell.detunings(0)) {
        for (c1, &d1) in universe.coeffs(1).iter().zip(shell.detunings(1)) {
            let dphi = c1.arg() - c0.arg();
            let weight = c0.norm() * c1.norm();
            leading += weight * (osc.omega * t - dphi).cos();
            correction += weight * t * (d0 - d1) * (osc.omega * t - dphi).sin();
        }
    }
    Ok(osc.x_amplitude() * (leading - correction))
}

/// Discrete average of the double-sum oscillation over one clock period.
/// When `omega` and the shell energies sit on the `2 pi / T` grid every
/// contributing frequency is a nonzero harmonic and the average vanishes.
pub fn position_period_average(
    universe: &UniverseState,
    osc: &OscillatorConfig,
    grid: &TimeGrid,
) -> Result<f64> {
    grid.require_anti_aliased(universe.shell().clock())?;
    let period = universe.shell().clock().period();
    let n = grid.samples();
    let mut acc = 0.0;
    for m in 0..n {
        acc += position_expectation(universe, osc, m as f64 * period / n as f64)?;
    }
    Ok(acc / n as f64)
}

/// Time-averaged reduced state of the two-level subsystem.
pub fn toy_time_average(universe: &UniverseState, grid: &TimeGrid) -> Result<DensityMatrix> {
    require_two_levels(universe)?;
    time_average_density_matrix(universe, grid)
}
