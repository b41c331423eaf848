//! Clock and system energy spectra.
//!
//! Clock energies live on an exact integer grid: `E_i = 2 pi r_i / T` with
//! `r_i` a strictly increasing list of integers starting at zero. Every
//! frame identity downstream holds exactly because of this representation;
//! float energies are derived on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, TAU};

/// How a clock spectrum was produced. Carried along for lossless
/// serialization of the construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum SpectrumSource {
    /// Quantized from rational energy ratios `E_i / E_1 = A_i / D_i`.
    Rational { ratios: Vec<(u64, u64)>, e1: f64 },
    /// Engineered so the density of states grows like `e^{beta E}`.
    Exponential { beta: f64, nu0: f64 },
    /// Grid indices supplied directly.
    Explicit,
}

/// Non-degenerate clock spectrum on the `2 pi / T` integer grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockSpectrum {
    r: Vec<u64>,
    period: f64,
    #[serde(flatten)]
    source: SpectrumSource,
}

impl ClockSpectrum {
    /// Build from explicit grid indices. `r` must be strictly increasing,
    /// start at 0 and contain at least two entries.
    pub fn from_grid_indices(r: Vec<u64>, period: f64) -> Result<Self> {
        if r.len() < 2 {
            return Err(Error::InvalidParameter(
                "clock needs at least two levels".into(),
            ));
        }
        if r[0] != 0 {
            return Err(Error::InvalidParameter("lowest grid index must be 0".into()));
        }
        if !r.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "grid indices must be strictly increasing".into(),
            ));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidParameter("period must be positive".into()));
        }
        Ok(Self {
            r,
            period,
            source: SpectrumSource::Explicit,
        })
    }

    /// Number of levels `d_C = p + 1`.
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// Index of the highest level, `p`.
    pub fn top_level(&self) -> usize {
        self.r.len() - 1
    }

    /// Highest grid index `r_p`.
    pub fn top_index(&self) -> u64 {
        *self.r.last().unwrap()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Grid step `2 pi / T`, the smallest representable energy.
    pub fn energy_step(&self) -> f64 {
        TAU / self.period
    }

    pub fn grid_indices(&self) -> &[u64] {
        &self.r
    }

    /// `E_i = 2 pi r_i / T`.
    pub fn energy(&self, i: usize) -> f64 {
        TAU * self.r[i] as f64 / self.period
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.energy(i)).collect()
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    /// Indices of levels with energy in the half-open window `[lo, hi)`.
    pub fn levels_in_window(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let e = self.energy(i);
                e >= lo && e < hi
            })
            .collect()
    }

    /// True when the grid indices are exactly `0, 1, ..., p`.
    pub fn is_harmonic(&self) -> bool {
        self.r.iter().enumerate().all(|(i, &r)| r == i as u64)
    }
}

/// Quantize rational energy ratios `E_i / E_1 = A_i / D_i` onto the integer
/// grid. `r_1` becomes the least common multiple of the denominators and
/// `T = 2 pi r_1 / E_1`, so every level is reproduced exactly.
pub fn quantize_rational_spectrum(ratios: &[(u64, u64)], e1: f64) -> Result<ClockSpectrum> {
    if ratios.is_empty() {
        return Err(Error::NoRatios);
    }
    if !(e1 > 0.0) {
        return Err(Error::InvalidParameter("E_1 must be positive".into()));
    }
    for (idx, &(a, d)) in ratios.iter().enumerate() {
        if a == 0 || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "ratio at position {idx} must have positive numerator and denominator"
            )));
        }
        let g = gcd(a, d);
        if g != 1 {
            return Err(Error::NonCoprimeRatio { a, d, g });
        }
        if idx > 0 {
            let (pa, pd) = ratios[idx - 1];
            // compare a/d with pa/pd exactly
            let lhs = a as u128 * pd as u128;
            let rhs = pa as u128 * d as u128;
            if lhs == rhs {
                return Err(Error::DuplicateRatio { index: idx });
            }
            if lhs < rhs {
                return Err(Error::NonIncreasingRatio { index: idx });
            }
        }
    }
    let mut r1: u64 = 1;
    for &(_, d) in ratios {
        r1 = lcm(r1, d).ok_or(Error::GridOverflow)?;
    }
    let mut r = Vec::with_capacity(ratios.len() + 1);
    r.push(0u64);
    for &(a, d) in ratios {
        let num = (r1 / d) as u128 * a as u128;
        let ri: u64 = num.try_into().map_err(|_| Error::GridOverflow)?;
        r.push(ri);
    }
    let period = TAU * r1 as f64 / e1;
    Ok(ClockSpectrum {
        r,
        period,
        source: SpectrumSource::Rational {
            ratios: ratios.to_vec(),
            e1,
        },
    })
}

/// Clock whose level density grows like `e^{beta E}`, so a thin shell cut
/// through it populates system levels with Boltzmann weights.
///
/// Level positions follow `eps_i = ln(1 + beta i / nu0) / beta`, rounded to
/// the `2 pi / T` grid; collisions bump to the next free integer.
pub fn build_exponential_clock(
    beta_target: f64,
    nu0: f64,
    p: usize,
    period: f64,
) -> Result<ClockSpectrum> {
    if !(beta_target > 0.0) || !(nu0 > 0.0) || !(period > 0.0) {
        return Err(Error::InvalidParameter(
            "beta_target, nu0 and period must all be positive".into(),
        ));
    }
    if p < 1 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    // Tightest level spacing is 1/(nu0 + beta p) at the top of the ladder;
    // the grid step must resolve it.
    let min_spacing = 1.0 / (nu0 + beta_target * p as f64);
    let step = TAU / period;
    if step > min_spacing {
        return Err(Error::GridTooCoarse {
            period,
            required_period: TAU * (nu0 + beta_target * p as f64),
        });
    }
    let mut r = Vec::with_capacity(p + 1);
    r.push(0u64);
    for i in 1..=p {
        let eps = (1.0 + beta_target * i as f64 / nu0).ln() / beta_target;
        let mut g = (eps / step).round() as u64;
        let prev = *r.last().unwrap();
        if g <= prev {
            g = prev + 1;
        }
        r.push(g);
    }
    Ok(ClockSpectrum {
        r,
        period,
        source: SpectrumSource::Exponential {
            beta: beta_target,
            nu0,
        },
    })
}

/// Regression slope of `ln(levels per window)` against window center, over
/// the populated range of the clock. For an exponential clock this is the
/// realized inverse temperature.
pub fn log_density_slope(clock: &ClockSpectrum, window: f64) -> Result<f64> {
    if !(window > 0.0) {
        return Err(Error::InvalidParameter("window must be positive".into()));
    }
    let top = clock.energy(clock.top_level());
    let mut centers = Vec::new();
    let mut logs = Vec::new();
    let mut lo = 0.0;
    while lo + window <= top {
        let count = clock.levels_in_window(lo, lo + window).len();
        if count > 0 {
            centers.push(lo + window / 2.0);
            logs.push((count as f64).ln());
        }
        lo += window;
    }
    if centers.len() < 2 {
        return Err(Error::EmptyWindow { lo: 0.0, hi: top });
    }
    Ok(linear_fit(&centers, &logs).0)
}

/// System spectrum: strictly increasing real energies, diagonal Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpectrum {
    levels: Vec<f64>,
}

impl SystemSpectrum {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter(
                "system needs at least one level".into(),
            ));
        }
        if !levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::NonIncreasingLevels);
        }
        Ok(Self { levels })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.levels[j]
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Smallest gap between consecutive levels; infinite for a single level.
    pub fn min_gap(&self) -> f64 {
        self.levels
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Window-counting entropy and the inverse temperature it implies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Window floor used for `S(E)`.
    pub energy: f64,
    /// `S(E) = ln N(E, delta)`.
    pub entropy: f64,
    /// `S(E + dE)` from the shifted window.
    pub entropy_shifted: f64,
    /// Energy shift used for the finite difference.
    pub d_energy: f64,
    /// Forward difference `(S(E+dE) - S(E)) / dE`.
    pub beta: f64,
}

/// Estimate `S(E) = ln N(E, delta)` and `beta = dS/dE` by counting clock
/// levels in two shifted windows. Uses the forward difference.
pub fn entropy_and_beta(
    clock: &ClockSpectrum,
    energy: f64,
    delta: f64,
    d_energy: f64,
) -> Result<ThermalParams> {
    if !(delta > 0.0) || !(d_energy > 0.0) {
        return Err(Error::InvalidParameter(
            "delta and dE must be positive".into(),
        ));
    }
    let n1 = clock.levels_in_window(energy, energy + delta).len();
    if n1 == 0 {
        return Err(Error::EmptyWindow {
            lo: energy,
            hi: energy + delta,
        });
    }
    let lo2 = energy + d_energy;
    let n2 = clock.levels_in_window(lo2, lo2 + delta).len();
    if n2 == 0 {
        return Err(Error::EmptyWindow {
            lo: lo2,
            hi: lo2 + delta,
        });
    }
    let s1 = (n1 as f64).ln();
    let s2 = (n2 as f64).ln();
    Ok(ThermalParams {
        energy,
        entropy: s1,
        entropy_shifted: s2,
        d_energy,
        beta: (s2 - s1) / d_energy,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> Option<u64> {
    (a / gcd(a, b)).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_excited_level() {
        let clock = quantize_rational_spectrum(&[(1, 1)], 1.0).unwrap();
        assert_eq!(clock.grid_indices(), &[0, 1]);
        assert_abs_diff_eq!(clock.period(), TAU, epsilon = 1e-15);
    }

    #[test]
    fn lcm_of_denominators_sets_r1() {
        let clock = quantize_rational_spectrum(&[(1, 1), (3, 2)], 1.0).unwrap();
        assert_eq!(clock.grid_indices(), &[0, 2, 3]);
        assert_abs_diff_eq!(clock.period(), 2.0 * TAU, epsilon = 1e-14);
        // energies reproduce E_i = E1 * A_i / D_i exactly on the grid
        assert_abs_diff_eq!(clock.energy(1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(clock.energy(2), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_ladder() {
        let omega = 0.7;
        let clock = quantize_rational_spectrum(&[(1, 1), (2, 1), (3, 1)], omega).unwrap();
        assert_eq!(clock.grid_indices(), &[0, 1, 2, 3]);
        assert_abs_diff_eq!(clock.period(), TAU / omega, epsilon = 1e-14);
        assert!(clock.is_harmonic());
    }

    #[test]
    fn quantization_is_integer_exact() {
        let clock = quantize_rational_spectrum(&[(2, 3), (1, 1), (7, 5)], 0.3).unwrap();
        // E_i * T / 2pi must land on integers
        for (i, &r) in clock.grid_indices().iter().enumerate() {
            let cycles = clock.energy(i) * clock.period() / TAU;
            assert_abs_diff_eq!(cycles, r as f64, epsilon = 1e-9);
        }
        assert_eq!(clock.grid_indices()[0], 0);
    }

    #[test]
    fn rejects_non_coprime() {
        let err = quantize_rational_spectrum(&[(2, 4)], 1.0).unwrap_err();
        assert!(matches!(err, Error::NonCoprimeRatio { g: 2, .. }));
    }

    #[test]
    fn rejects_duplicate_ratio() {
        let err = quantize_rational_spectrum(&[(1, 2), (1, 2)], 1.0).unwrap_err();
        assert!(matches!(err, Error::DuplicateRatio { index: 1 }));
    }

    #[test]
    fn rejects_lcm_overflow() {
        // pairwise coprime huge denominators blow past u64
        let ratios: Vec<(u64, u64)> = vec![
            (1, 4_294_967_291),
            (2, 4_294_967_279),
            (3, 4_294_967_231),
        ];
        let err = quantize_rational_spectrum(&ratios, 1.0).unwrap_err();
        assert!(matches!(err, Error::GridOverflow));
    }

    #[test]
    fn exponential_clock_small_beta_is_nearly_uniform() {
        let clock = build_exponential_clock(1e-6, 1.0, 20, 2.0e7).unwrap();
        for (i, &r) in clock.grid_indices().iter().enumerate() {
            let eps = TAU * r as f64 / clock.period();
            assert_abs_diff_eq!(eps, i as f64, epsilon = 1e-3);
        }
    }

    #[test]
    fn exponential_clock_two_levels() {
        let clock = build_exponential_clock(5.0, 1.0, 1, 1.0e3).unwrap();
        assert_eq!(clock.dim(), 2);
    }

    #[test]
    fn exponential_clock_density_slope() {
        let clock = build_exponential_clock(1.0, 50.0, 1999, 2.0e5).unwrap();
        let slope = log_density_slope(&clock, 0.25).unwrap();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn exponential_clock_coarse_grid_rejected() {
        let err = build_exponential_clock(1.0, 50.0, 1999, 100.0).unwrap_err();
        match err {
            Error::GridTooCoarse {
                required_period, ..
            } => assert!(required_period > 100.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn beta_of_uniform_clock_is_zero() {
        let r: Vec<u64> = (0..200).collect();
        let clock = ClockSpectrum::from_grid_indices(r, TAU * 10.0).unwrap();
        let params = entropy_and_beta(&clock, 2.0, 1.5, 3.0).unwrap();
        assert_abs_diff_eq!(params.beta, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_of_exponential_clock() {
        let clock = build_exponential_clock(1.0, 50.0, 1999, 2.0e5).unwrap();
        let params = entropy_and_beta(&clock, 3.0, 0.1, 0.3).unwrap();
        assert!((params.beta - 1.0).abs() < 0.1, "beta {}", params.beta);
    }

    #[test]
    fn single_level_windows_give_zero_beta() {
        // levels far apart: both windows hold exactly one level
        let clock = ClockSpectrum::from_grid_indices(vec![0, 1000, 2000], TAU * 1000.0).unwrap();
        let params = entropy_and_beta(&clock, 0.95, 0.1, 1.0).unwrap();
        assert_eq!(params.entropy, 0.0);
        assert_eq!(params.entropy_shifted, 0.0);
        assert_eq!(params.beta, 0.0);
    }

    #[test]
    fn empty_window_is_an_error() {
        let clock = ClockSpectrum::from_grid_indices(vec![0, 1], TAU).unwrap();
        assert!(matches!(
            entropy_and_beta(&clock, 50.0, 0.1, 1.0),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn system_spectrum_validation() {
        assert!(SystemSpectrum::new(vec![0.0, 1.0, 0.5]).is_err());
        let s = SystemSpectrum::new(vec![0.0, 0.4, 1.0]).unwrap();
        assert_abs_diff_eq!(s.min_gap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn serialization_round_trips_indices_verbatim() {
        let clock = quantize_rational_spectrum(&[(1, 1), (3, 2), (9, 4)], 0.25).unwrap();
        let text = serde_json::to_string(&clock).unwrap();
        let back: ClockSpectrum = serde_json::from_str(&text).unwrap();
        assert_eq!(clock, back);
    }
}
