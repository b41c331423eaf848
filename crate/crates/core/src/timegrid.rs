//! Time states and the discrete resolution of the identity.
//!
//! Clock time states `|t>` have components `e^{-i E_i t}` and are kept
//! unnormalized. Sampled uniformly over one period with `s + 1 >= r_p + 1`
//! samples they form an exact overcomplete frame; `identity_residual`
//! measures how exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{grid_phasor, reduced_phasor};
use crate::spectra::ClockSpectrum;

/// Unnormalized clock frame vector at time `t`.
#[derive(Debug, Clone)]
pub struct TimeState {
    pub t: f64,
    pub amplitudes: Vec<Complex64>,
}

/// Uniform sampling of one clock period: `t_m = t0 + m T / (s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    samples: usize,
}

impl TimeGrid {
    /// `samples` is `s + 1`, the number of grid points over one period.
    pub fn new(t0: f64, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter(
                "time grid needs at least one sample".into(),
            ));
        }
        Ok(Self { t0, samples })
    }

    /// Critical grid for a clock: `s + 1 = r_p + 1`, the smallest
    /// anti-aliased sampling.
    pub fn critical(clock: &ClockSpectrum) -> Self {
        Self {
            t0: 0.0,
            samples: clock.top_index() as usize + 1,
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn time(&self, clock: &ClockSpectrum, m: usize) -> f64 {
        self.t0 + m as f64 * clock.period() / self.samples as f64
    }

    /// Frame weight `(p + 1) / (s + 1)`.
    pub fn weight(&self, clock: &ClockSpectrum) -> f64 {
        clock.dim() as f64 / self.samples as f64
    }

    /// The discrete identities are exact only with a strict margin: at
    /// `s + 1 = r_p` the index difference `r_p - r_0` aliases to zero.
    pub fn is_anti_aliased(&self, clock: &ClockSpectrum) -> bool {
        self.samples as u64 >= clock.top_index() + 1
    }

    pub fn require_anti_aliased(&self, clock: &ClockSpectrum) -> Result<()> {
        if self.is_anti_aliased(clock) {
            Ok(())
        } else {
            Err(Error::AliasedGrid {
                samples: self.samples,
                required: clock.top_index() as usize + 1,
            })
        }
    }
}

/// `|t>` with components `e^{-i E_i t}`.
pub fn time_state(clock: &ClockSpectrum, t: f64) -> TimeState {
    let x = t / clock.period();
    let amplitudes = clock
        .grid_indices()
        .iter()
        .map(|&r| reduced_phasor(r, x).conj())
        .collect();
    TimeState { t, amplitudes }
}

/// Max-norm deviation of `w sum_m |t_m><t_m| / d_C` from the identity on
/// the clock space. Zero (to rounding) for any anti-aliased grid; order one
/// when an index difference aliases to a multiple of `s + 1`.
pub fn identity_residual(clock: &ClockSpectrum, grid: &TimeGrid) -> f64 {
    let d = clock.dim();
    let n = grid.samples() as u64;
    let r = clock.grid_indices();
    let x0 = grid.t0() / clock.period();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for k in 0..d {
            // sum_m e^{-i (E_i - E_k) t_m} / n, phases reduced exactly in m
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                acc += grid_phasor(r[i], m, n).conj() * grid_phasor(r[k], m, n);
            }
            // constant t0 phase, modulus-preserving
            let t0_phase = reduced_phasor(r[i], x0).conj() * reduced_phasor(r[k], x0);
            let entry = acc * t0_phase / n as f64;
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((entry - target).norm());
        }
    }
    worst
}

/// `<t|t'> = sum_i e^{i E_i (t - t')}`, evaluated as a sum of unit phasors.
pub fn overlap(clock: &ClockSpectrum, t: f64, t2: f64) -> Complex64 {
    let x = (t - t2) / clock.period();
    clock
        .grid_indices()
        .iter()
        .map(|&r| reduced_phasor(r, x))
        .sum()
}

/// Both sides of the orthogonality integral
/// `int_0^T dt e^{i (E_i - E_k) t} = T delta_{ik}`.
#[derive(Debug, Clone, Copy)]
pub struct OrthogonalityCheck {
    /// `T delta_{ik}`, exact because index differences are nonzero integers.
    pub analytic: Complex64,
    /// Uniform Riemann sum with `n_quad` points.
    pub quadrature: Complex64,
}

impl OrthogonalityCheck {
    pub fn residual(&self) -> f64 {
        (self.analytic - self.quadrature).norm()
    }
}

/// Cross-check the orthogonality integral for the level pair `(i, k)` with
/// an `n_quad`-point Riemann sum. Exact whenever `n_quad > |r_i - r_k|`.
pub fn orthogonality_integral(
    clock: &ClockSpectrum,
    i: usize,
    k: usize,
    n_quad: usize,
) -> OrthogonalityCheck {
    let t = clock.period();
    let n = n_quad as u64;
    let (ri, rk) = (clock.grid_indices()[i], clock.grid_indices()[k]);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        acc += grid_phasor(ri, m, n) * grid_phasor(rk, m, n).conj();
    }
    let quadrature = acc * t / n as f64;
    let analytic = if i == k {
        Complex64::new(t, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    OrthogonalityCheck {
        analytic,
        quadrature,
    }
}

/// Apply the discrete frame operator `w sum_m |t_m><t_m| / d_C` to a clock
/// vector. Reproduces the input on anti-aliased grids.
pub fn apply_frame(clock: &ClockSpectrum, grid: &TimeGrid, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(v.len(), clock.dim());
    let n = grid.samples() as u64;
    let r = clock.grid_indices();
    let x0 = grid.t0() / clock.period();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for m in 0..n {
        // <t_m|v>, with the normalization folded into the overall 1/n
        let mut inner = Complex64::new(0.0, 0.0);
        for (k, &rk) in r.iter().enumerate() {
            let phase_k = grid_phasor(rk, m, n) * reduced_phasor(rk, x0);
            inner += phase_k * v[k];
        }
        for (i, &ri) in r.iter().enumerate() {
            let phase_i = grid_phasor(ri, m, n) * reduced_phasor(ri, x0);
            out[i] += phase_i.conj() * inner / n as f64;
        }
    }
    out
}

/// Convenience: `e^{+i E_i t_m}` for grid sample `m`, with the `m`-dependent
/// part reduced exactly. Used by the conditioning and averaging code.
pub(crate) fn grid_conditioning_phase(
    clock: &ClockSpectrum,
    grid: &TimeGrid,
    level: usize,
    m: u64,
) -> Complex64 {
    let n = grid.samples() as u64;
    let r = clock.grid_indices()[level];
    let x0 = grid.t0() / clock.period();
    grid_phasor(r, m, n) * reduced_phasor(r, x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::TAU;
    use crate::spectra::ClockSpectrum;
    use approx::assert_abs_diff_eq;

    fn clock(r: Vec<u64>, period: f64) -> ClockSpectrum {
        ClockSpectrum::from_grid_indices(r, period).unwrap()
    }

    #[test]
    fn time_state_at_zero_is_all_ones() {
        let c = clock(vec![0, 1, 2], TAU);
        let ts = time_state(&c, 0.0);
        for a in &ts.amplitudes {
            assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn time_state_at_half_period() {
        let c = clock(vec![0, 1, 2], TAU);
        let ts = time_state(&c, std::f64::consts::PI);
        let expect = [1.0, -1.0, 1.0];
        for (a, e) in ts.amplitudes.iter().zip(expect) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn time_state_self_overlap_is_dimension() {
        let c = clock(vec![0, 3, 7, 11], 5.0);
        let ts = time_state(&c, 1.234);
        let total: f64 = ts.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(total, c.dim() as f64, epsilon = 1e-12);
    }

    #[test]
    fn periodicity_on_the_grid() {
        let c = clock(vec![0, 2, 5, 9], 3.0);
        let a = time_state(&c, 0.4);
        let b = time_state(&c, 0.4 + c.period());
        for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_residual_three_levels() {
        let c = clock(vec![0, 1, 2], TAU);
        let grid = TimeGrid::new(0.0, 4).unwrap();
        assert!(identity_residual(&c, &grid) <= 1e-12);
    }

    #[test]
    fn identity_residual_orthonormal_basis_case() {
        let c = clock(vec![0, 1], TAU);
        let grid = TimeGrid::new(0.0, 2).unwrap();
        assert!(identity_residual(&c, &grid) <= 1e-12);
    }

    #[test]
    fn identity_residual_aliased_case() {
        // difference 3 aliases to 0 mod 3: off-diagonals survive at order one
        let c = clock(vec![0, 3], TAU);
        let grid = TimeGrid::new(0.0, 3).unwrap();
        let res = identity_residual(&c, &grid);
        assert!(res > 0.5, "residual {res}");
    }

    #[test]
    fn identity_residual_with_offset_origin() {
        let c = clock(vec![0, 2, 3, 5], 7.0);
        let grid = TimeGrid::new(0.31, 6).unwrap();
        assert!(identity_residual(&c, &grid) <= 1e-12);
    }

    #[test]
    fn overlap_at_equal_times() {
        let c = clock(vec![0, 2, 3], 2.0 * TAU);
        let z = overlap(&c, 1.7, 1.7);
        assert_abs_diff_eq!(z.re, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_harmonic_dft_zero() {
        let p = 5;
        let c = clock((0..=p).collect(), TAU);
        let dt = c.period() / (p + 1) as f64;
        let z = overlap(&c, dt, 0.0);
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn overlap_three_phasors() {
        // r = [0,2,3], T = 4 pi, dt = pi: 1 + e^{i pi} + e^{i 3 pi/2} = -i
        let c = clock(vec![0, 2, 3], 2.0 * TAU);
        let z = overlap(&c, std::f64::consts::PI, 0.0);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonality_diagonal_gives_period() {
        let c = clock(vec![0, 5], TAU);
        let check = orthogonality_integral(&c, 1, 1, 6);
        assert_abs_diff_eq!(check.quadrature.re, c.period(), epsilon = 1e-12);
        assert!(check.residual() <= 1e-12 * c.period());
    }

    #[test]
    fn orthogonality_off_diagonal_vanishes() {
        let c = clock(vec![0, 5], TAU);
        let check = orthogonality_integral(&c, 0, 1, 6);
        assert!(check.quadrature.norm() <= 1e-12);
    }

    #[test]
    fn frame_reconstructs_vectors() {
        let c = clock(vec![0, 1, 4, 6], 2.5);
        let grid = TimeGrid::critical(&c);
        let v: Vec<Complex64> = (0..c.dim())
            .map(|i| Complex64::new(0.3 + i as f64, 1.0 - 0.2 * i as f64))
            .collect();
        let w = apply_frame(&c, &grid, &v);
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        }
    }
}
