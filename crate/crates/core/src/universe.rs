//! Global pure states on the energy shell.
//!
//! A shell `[E, E + delta)` through the clock-times-system spectrum couples
//! each system level `j` to the clock window `I_j`. Random universes draw
//! the supported coefficients from independent real Gaussians; sharp
//! universes satisfy the total-energy constraint exactly.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::numeric::TAU;
use crate::spectra::{ClockSpectrum, SystemSpectrum};

/// Shell support: per system level `j`, the clock indices with
/// `E_i in [E - E_j, E - E_j + delta)` and their detunings
/// `Delta_ij = E_i + E_j - E in [0, delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyShell {
    clock: ClockSpectrum,
    system: SystemSpectrum,
    energy: f64,
    delta: f64,
    support: Vec<Vec<usize>>,
    detunings: Vec<Vec<f64>>,
}

impl EnergyShell {
    pub fn clock(&self) -> &ClockSpectrum {
        &self.clock
    }

    pub fn system(&self) -> &SystemSpectrum {
        &self.system
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Clock indices coupled to system level `j`.
    pub fn window(&self, j: usize) -> &[usize] {
        &self.support[j]
    }

    /// Detunings for the window of system level `j`, aligned with `window(j)`.
    pub fn detunings(&self, j: usize) -> &[f64] {
        &self.detunings[j]
    }

    pub fn system_dim(&self) -> usize {
        self.support.len()
    }

    /// Total number of shell basis states `N = sum_j |I_j|`.
    pub fn total_states(&self) -> usize {
        self.support.iter().map(Vec::len).sum()
    }

    pub fn min_window(&self) -> usize {
        self.support.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// System levels whose window came out empty. Permitted, but callers
    /// that need every level populated should check.
    pub fn empty_levels(&self) -> Vec<usize> {
        self.support
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_empty())
            .map(|(j, _)| j)
            .collect()
    }
}

/// Compute the shell support sets. `delta` must be positive and below the
/// system's minimum gap, which keeps the windows pairwise disjoint.
pub fn support_sets(
    clock: &ClockSpectrum,
    system: &SystemSpectrum,
    energy: f64,
    delta: f64,
) -> Result<EnergyShell> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let min_gap = system.min_gap();
    if delta >= min_gap {
        return Err(Error::WindowOverlap { delta, min_gap });
    }
    let mut support = Vec::with_capacity(system.dim());
    let mut detunings = Vec::with_capacity(system.dim());
    for j in 0..system.dim() {
        let lo = energy - system.energy(j);
        let window = clock.levels_in_window(lo, lo + delta);
        let deltas = window
            .iter()
            .map(|&i| clock.energy(i) + system.energy(j) - energy)
            .collect();
        support.push(window);
        detunings.push(deltas);
    }
    if support.iter().all(Vec::is_empty) {
        return Err(Error::EmptyShell);
    }
    let shell = EnergyShell {
        clock: clock.clone(),
        system: system.clone(),
        energy,
        delta,
        support,
        detunings,
    };
    debug_assert!(windows_disjoint(&shell));
    Ok(shell)
}

fn windows_disjoint(shell: &EnergyShell) -> bool {
    let mut seen = std::collections::HashSet::new();
    for w in &shell.support {
        for &i in w {
            if !seen.insert(i) {
                return false;
            }
        }
    }
    true
}

/// Pure state of the universe, supported on a shell.
#[derive(Debug, Clone)]
pub struct UniverseState {
    shell: EnergyShell,
    coeffs: Vec<Vec<Complex64>>,
    normalized: bool,
}

impl UniverseState {
    pub fn shell(&self) -> &EnergyShell {
        &self.shell
    }

    /// Coefficients for the window of system level `j`, aligned with
    /// `shell.window(j)`.
    pub fn coeffs(&self, j: usize) -> &[Complex64] {
        &self.coeffs[j]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// True when every detuning vanishes, i.e. `H |Psi> = E |Psi>` exactly.
    pub fn is_sharp(&self) -> bool {
        self.shell.detunings.iter().flatten().all(|&d| d == 0.0)
    }

    /// Population of system level `j`: `sum_{i in I_j} |c_ij|^2`.
    pub fn population(&self, j: usize) -> f64 {
        self.coeffs[j].iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|| H |Psi> - E |Psi> ||`; bounded by `delta` on the shell.
    pub fn constraint_residual(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.shell.system_dim() {
            for (c, &d) in self.coeffs[j].iter().zip(self.shell.detunings(j)) {
                acc += c.norm_sqr() * d * d;
            }
        }
        acc.sqrt()
    }
}

/// Draw a random universe: real and imaginary parts of every supported
/// coefficient are independent `N(0, 1/2)`, then the state is normalized.
///
/// The generator is ChaCha12 keyed by `seed`, with one counter stream per
/// `(j, i)` pair (`stream = j << 32 | i`), so coefficients are reproducible
/// independently of evaluation order.
pub fn sample_universe(shell: &EnergyShell, seed: u64) -> UniverseState {
    let sigma = (0.5f64).sqrt();
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut coeffs: Vec<Vec<Complex64>> = Vec::with_capacity(shell.system_dim());
    for (j, window) in shell.support.iter().enumerate() {
        let mut row = Vec::with_capacity(window.len());
        for &i in window {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(((j as u64) << 32) | i as u64);
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            row.push(Complex64::new(re, im));
        }
        coeffs.push(row);
    }
    let norm: f64 = coeffs
        .iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for row in &mut coeffs {
        for c in row {
            *c /= norm;
        }
    }
    UniverseState {
        shell: shell.clone(),
        coeffs,
        normalized: true,
    }
}

/// Build a sharp (`delta = 0`) universe: each system level with nonzero
/// amplitude couples to the single clock level resonant with `E - E_j`.
/// The total-energy constraint then holds exactly.
pub fn sharp_universe(
    clock: &ClockSpectrum,
    system: &SystemSpectrum,
    energy: f64,
    amplitudes: &[Complex64],
) -> Result<UniverseState> {
    if amplitudes.len() != system.dim() {
        return Err(Error::WrongSystemDimension {
            expected: system.dim(),
            got: amplitudes.len(),
        });
    }
    let step = clock.energy_step();
    let mut support = Vec::with_capacity(system.dim());
    let mut detunings = Vec::with_capacity(system.dim());
    let mut coeffs = Vec::with_capacity(system.dim());
    let mut norm_sqr = 0.0;
    for (j, &amp) in amplitudes.iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            support.push(Vec::new());
            detunings.push(Vec::new());
            coeffs.push(Vec::new());
            continue;
        }
        let target = energy - system.energy(j);
        let grid_index = (target / step).round();
        let matched = if grid_index < 0.0 {
            None
        } else {
            let rt = grid_index as u64;
            clock
                .grid_indices()
                .iter()
                .position(|&r| r == rt)
                .filter(|&i| (clock.energy(i) - target).abs() <= 1e-9 * (1.0 + energy.abs()))
        };
        let i = matched.ok_or(Error::NoResonantLevel { level: j })?;
        support.push(vec![i]);
        detunings.push(vec![0.0]);
        coeffs.push(vec![amp]);
        norm_sqr += amp.norm_sqr();
    }
    if norm_sqr == 0.0 {
        return Err(Error::EmptyShell);
    }
    let norm = norm_sqr.sqrt();
    for row in &mut coeffs {
        for c in row {
            *c /= norm;
        }
    }
    Ok(UniverseState {
        shell: EnergyShell {
            clock: clock.clone(),
            system: system.clone(),
            energy,
            delta: 0.0,
            support,
            detunings,
        },
        coeffs,
        normalized: true,
    })
}

/// Dump a universe as CSV records `{E, delta, j, i, re, im}`.
pub fn write_universe_csv<W: Write>(universe: &UniverseState, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["energy", "delta", "system_level", "clock_level", "re", "im"])?;
    let shell = universe.shell();
    for j in 0..shell.system_dim() {
        for (&i, c) in shell.window(j).iter().zip(universe.coeffs(j)) {
            out.write_record([
                format!("{:.16e}", shell.energy()),
                format!("{:.16e}", shell.delta()),
                j.to_string(),
                i.to_string(),
                format!("{:.16e}", c.re),
                format!("{:.16e}", c.im),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Load a universe dumped by [`write_universe_csv`] back onto a shell.
/// Records outside the shell support are rejected.
pub fn read_universe_csv<R: Read>(shell: &EnergyShell, reader: R) -> Result<UniverseState> {
    let mut input = csv::Reader::from_reader(reader);
    let mut coeffs: Vec<Vec<Complex64>> = shell
        .support
        .iter()
        .map(|w| vec![Complex64::new(0.0, 0.0); w.len()])
        .collect();
    for record in input.records() {
        let record = record?;
        if record.len() != 6 {
            return Err(Error::MalformedRecord(format!(
                "expected 6 fields, got {}",
                record.len()
            )));
        }
        let j: usize = record[2]
            .parse()
            .map_err(|_| Error::MalformedRecord(record[2].to_string()))?;
        let i: usize = record[3]
            .parse()
            .map_err(|_| Error::MalformedRecord(record[3].to_string()))?;
        let re: f64 = record[4]
            .parse()
            .map_err(|_| Error::MalformedRecord(record[4].to_string()))?;
        let im: f64 = record[5]
            .parse()
            .map_err(|_| Error::MalformedRecord(record[5].to_string()))?;
        let slot = shell
            .support
            .get(j)
            .and_then(|w| w.iter().position(|&k| k == i))
            .ok_or(Error::OffSupportRecord {
                clock_level: i,
                system_level: j,
            })?;
        coeffs[j][slot] = Complex64::new(re, im);
    }
    let norm_sqr: f64 = coeffs.iter().flatten().map(|c| c.norm_sqr()).sum();
    Ok(UniverseState {
        shell: shell.clone(),
        normalized: (norm_sqr - 1.0).abs() <= 1e-9,
        coeffs,
    })
}

/// Test/bench helper: a clock with grid level 0 plus one dense band of
/// `count` levels ending just below `E - E_j` + delta for each system
/// level. `spacing` is in grid steps.
pub fn banded_clock(
    system: &SystemSpectrum,
    energy: f64,
    delta: f64,
    count: usize,
    period: f64,
) -> Result<ClockSpectrum> {
    let step = TAU / period;
    let mut r = vec![0u64];
    for j in (0..system.dim()).rev() {
        let lo = energy - system.energy(j);
        let start = (lo / step).ceil() as u64;
        // spread `count` levels across the window [lo, lo + delta)
        let width_steps = (delta / step).floor().max(1.0) as u64;
        let spacing = (width_steps / count as u64).max(1);
        for k in 0..count as u64 {
            let idx = start + k * spacing;
            if (idx as f64) * step < lo + delta {
                if *r.last().unwrap() < idx {
                    r.push(idx);
                }
            }
        }
    }
    ClockSpectrum::from_grid_indices(r, period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::build_exponential_clock;
    use approx::assert_abs_diff_eq;

    fn qubit() -> SystemSpectrum {
        SystemSpectrum::new(vec![0.0, 1.0]).unwrap()
    }

    fn dense_clock() -> ClockSpectrum {
        // spacing 1e-3 around E = 10
        let period = TAU / 1e-3;
        let r: Vec<u64> = std::iter::once(0).chain(8_000..=10_500).collect();
        ClockSpectrum::from_grid_indices(r, period).unwrap()
    }

    #[test]
    fn support_counts_near_ten() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        assert_eq!(shell.window(0).len(), 10);
        assert_eq!(shell.window(1).len(), 10);
        // disjoint
        let a: std::collections::HashSet<_> = shell.window(0).iter().collect();
        assert!(shell.window(1).iter().all(|i| !a.contains(i)));
    }

    #[test]
    fn narrow_delta_gives_tiny_windows() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1.5e-3).unwrap();
        assert!(shell.window(0).len() <= 2);
        assert!(shell.window(1).len() <= 2);
    }

    #[test]
    fn single_level_system_takes_whole_window() {
        let system = SystemSpectrum::new(vec![0.0]).unwrap();
        let clock = dense_clock();
        let shell = support_sets(&clock, &system, 10.0, 5e-3).unwrap();
        let expect = clock.levels_in_window(10.0, 10.0 + 5e-3).len();
        assert_eq!(shell.window(0).len(), expect);
    }

    #[test]
    fn wide_delta_rejected() {
        let err = support_sets(&dense_clock(), &qubit(), 10.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::WindowOverlap { .. }));
    }

    #[test]
    fn detunings_stay_in_shell() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        for j in 0..2 {
            for &d in shell.detunings(j) {
                assert!(d >= 0.0 && d < shell.delta());
            }
        }
    }

    #[test]
    fn sampled_universe_is_normalized_and_deterministic() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        let a = sample_universe(&shell, 7);
        let b = sample_universe(&shell, 7);
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
        for j in 0..2 {
            assert_eq!(a.coeffs(j), b.coeffs(j));
        }
        let c = sample_universe(&shell, 8);
        assert_ne!(a.coeffs(0), c.coeffs(0));
    }

    #[test]
    fn ensemble_mean_population_matches_window_fractions() {
        // small shell so 10^4 samples stay cheap
        let clock = build_exponential_clock(1.0, 20.0, 400, 2.0e4).unwrap();
        let shell = support_sets(&clock, &qubit(), 2.5, 0.5).unwrap();
        let n = shell.total_states() as f64;
        let n_samples = 10_000;
        let mut mean_pop0 = 0.0;
        let mut mean_csq = 0.0;
        for seed in 0..n_samples {
            let u = sample_universe(&shell, seed);
            mean_pop0 += u.population(0);
            mean_csq += u.coeffs(0)[0].norm_sqr();
        }
        mean_pop0 /= n_samples as f64;
        mean_csq /= n_samples as f64;
        let frac0 = shell.window(0).len() as f64 / n;
        // population fluctuation ~ 1/sqrt(min window); 3 sigma margins
        assert!(
            (mean_pop0 - frac0).abs() < 3.0 / (shell.min_window() as f64).sqrt()
                / (n_samples as f64).sqrt()
                + 3e-3,
            "mean {mean_pop0} vs {frac0}"
        );
        assert!((mean_csq - 1.0 / n).abs() < 3.0 / n / (n_samples as f64 / 4.0).sqrt());
    }

    #[test]
    fn shell_residual_bounded_by_delta() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        for seed in 0..20 {
            let u = sample_universe(&shell, seed);
            assert!(u.constraint_residual() <= shell.delta() + 1e-15);
        }
    }

    #[test]
    fn sharp_universe_satisfies_constraint_exactly() {
        // harmonic clock with unit spacing; E = 5, system {0, 1}
        let r: Vec<u64> = (0..=8).collect();
        let clock = ClockSpectrum::from_grid_indices(r, TAU).unwrap();
        let amp = Complex64::new(1.0, 0.0);
        let u = sharp_universe(&clock, &qubit(), 5.0, &[amp, amp]).unwrap();
        assert!(u.is_sharp());
        assert_abs_diff_eq!(u.norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(u.constraint_residual() <= 1e-12);
        assert_eq!(u.shell().window(0), &[5]);
        assert_eq!(u.shell().window(1), &[4]);
    }

    #[test]
    fn sharp_universe_single_level_is_product_state() {
        let r: Vec<u64> = (0..=8).collect();
        let clock = ClockSpectrum::from_grid_indices(r, TAU).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let u = sharp_universe(&clock, &qubit(), 5.0, &[one, zero]).unwrap();
        assert_eq!(u.shell().window(1).len(), 0);
        assert_eq!(u.shell().total_states(), 1);
    }

    #[test]
    fn sharp_universe_missing_resonance() {
        let clock = ClockSpectrum::from_grid_indices(vec![0, 2, 4], TAU).unwrap();
        let one = Complex64::new(1.0, 0.0);
        // E - E_0 = 4 is on the grid but E - E_1 = 3 is not
        let err = sharp_universe(&clock, &qubit(), 4.0, &[one, one]).unwrap_err();
        assert!(matches!(err, Error::NoResonantLevel { level: 1 }));
    }

    #[test]
    fn csv_round_trip() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        let u = sample_universe(&shell, 3);
        let mut buf = Vec::new();
        write_universe_csv(&u, &mut buf).unwrap();
        let v = read_universe_csv(&shell, buf.as_slice()).unwrap();
        assert!(v.is_normalized());
        for j in 0..2 {
            for (a, b) in u.coeffs(j).iter().zip(v.coeffs(j)) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn csv_rejects_off_support() {
        let shell = support_sets(&dense_clock(), &qubit(), 10.0, 1e-2).unwrap();
        let text = "energy,delta,system_level,clock_level,re,im\n10.0,0.01,0,1,0.5,0.0\n";
        let err = read_universe_csv(&shell, text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::OffSupportRecord { .. }));
    }
}
