//! Conditional probabilities from external-time averaging: the probability of
//! a system outcome given that the clock shows `t`, at one or two times.
//!
//! The clock reading is modelled by the positive element `w |t><t|` built on
//! a resolving grid; for a harmonic clock (grid indices `0..=p`, one sample
//! per index) these become orthogonal projectors and the two-time expression
//! collapses to the textbook measure-evolve-measure rule.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{grid_phasor, phasor, reduced_phasor};
use crate::universe::UniverseState;

/// System-side measurement effect: a validated orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEffect {
    label: String,
    projector: DMatrix<Complex64>,
}

impl MeasurementEffect {
    /// Rank-1 projector on basis level `j` of a `dim`-level system.
    pub fn basis(label: impl Into<String>, dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {j} outside system dimension {dim}"
            )));
        }
        let mut projector = DMatrix::zeros(dim, dim);
        projector[(j, j)] = Complex64::ONE;
        Ok(Self {
            label: label.into(),
            projector,
        })
    }

    /// Rank-1 projector `|v><v| / <v|v>`.
    pub fn from_vector(label: impl Into<String>, v: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= 1e-150 {
            return Err(Error::ZeroNormState);
        }
        let d = v.len();
        let mut projector = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                projector[(a, b)] = v[a] * v[b].conj() / norm_sqr;
            }
        }
        Ok(Self {
            label: label.into(),
            projector,
        })
    }

    /// Arbitrary projector, checked Hermitian and idempotent to `1e-10`.
    pub fn from_projector(label: impl Into<String>, projector: DMatrix<Complex64>) -> Result<Self> {
        if !projector.is_square() {
            return Err(Error::DimensionMismatch {
                a: projector.nrows(),
                b: projector.ncols(),
            });
        }
        let herm = (&projector - projector.adjoint()).camax();
        let idem = (&projector * &projector - &projector).camax();
        if herm > 1e-10 || idem > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "not a projector: hermiticity {herm:.3e}, idempotence {idem:.3e}"
            )));
        }
        Ok(Self {
            label: label.into(),
            projector,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn projector(&self) -> &DMatrix<Complex64> {
        &self.projector
    }

    fn check_dim(&self, system_dim: usize) -> Result<()> {
        if self.dim() != system_dim {
            return Err(Error::DimensionMismatch {
                a: self.dim(),
                b: system_dim,
            });
        }
        Ok(())
    }

    /// `P v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = vec![Complex64::ZERO; d];
        for a in 0..d {
            for b in 0..d {
                out[a] += self.projector[(a, b)] * v[b];
            }
        }
        out
    }

    /// `<v| P |v>`, real for a projector.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(pv, x)| (x.conj() * pv).re)
            .sum()
    }
}

fn require_theta_grid(universe: &UniverseState, theta_steps: usize) -> Result<()> {
    let required = universe.shell().clock().top_index() as usize + 1;
    if theta_steps < required {
        return Err(Error::AliasedGrid {
            samples: theta_steps,
            required,
        });
    }
    Ok(())
}

/// Probability of outcome `effect` given that the clock shows `t`, from the
/// ratio of external-time-averaged joint and marginal clock statistics. The
/// global dynamical phase cancels between numerator and denominator, so only
/// the shell detunings enter the average; a sharp universe reproduces the
/// Born rule on the relative state exactly, a broad shell carries a bias of
/// order `delta * T`.
pub fn single_time_probability(
    universe: &UniverseState,
    effect: &MeasurementEffect,
    t: f64,
    theta_steps: usize,
) -> Result<f64> {
    require_theta_grid(universe, theta_steps)?;
    let shell = universe.shell();
    effect.check_dim(shell.system_dim())?;
    let clock = shell.clock();
    let period = clock.period();
    let x = t / period;
    let mut num = 0.0;
    let mut den = 0.0;
    for q in 0..theta_steps {
        let theta = q as f64 * period / theta_steps as f64;
        let mut v = vec![Complex64::ZERO; shell.system_dim()];
        for (j, slot) in v.iter_mut().enumerate() {
            for ((&i, c), &delta) in shell
                .window(j)
                .iter()
                .zip(universe.coeffs(j))
                .zip(shell.detunings(j))
            {
                let conditioning = reduced_phasor(clock.grid_indices()[i], x);
                *slot += c * conditioning * phasor(-delta * theta);
            }
        }
        num += effect.expectation(&v);
        den += v.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    if den / theta_steps as f64 <= 1e-14 {
        return Err(Error::UnconditionedTime { value: t });
    }
    Ok(num / den)
}

/// Conditional probability of `second` at `t_f` given `first` at `t_i`.
///
/// Requires a sharp universe on a harmonic clock so the grid time states are
/// an orthogonal basis and the sandwiched-projector average is exact. Because
/// the state is sharp, the outer external-time average contributes only a
/// global phase; the inner average survives as a sum over the offset
/// `tau = theta' - theta` and is evaluated on the `theta_steps` grid.
pub fn two_time_probability(
    universe: &UniverseState,
    first: (&MeasurementEffect, f64),
    second: (&MeasurementEffect, f64),
    theta_steps: usize,
) -> Result<f64> {
    let shell = universe.shell();
    let clock = shell.clock();
    if !universe.is_sharp() {
        return Err(Error::SharpUniverseRequired);
    }
    if !clock.is_harmonic() {
        return Err(Error::HarmonicClockRequired);
    }
    require_theta_grid(universe, theta_steps)?;
    let (effect_i, t_i) = first;
    let (effect_f, t_f) = second;
    let d_s = shell.system_dim();
    effect_i.check_dim(d_s)?;
    effect_f.check_dim(d_s)?;
    let d_c = clock.dim();
    let period = clock.period();

    // condition on t_i, then project the system outcome
    let xi = t_i / period;
    let mut phi_i = vec![Complex64::ZERO; d_s];
    for (j, slot) in phi_i.iter_mut().enumerate() {
        for (&i, c) in shell.window(j).iter().zip(universe.coeffs(j)) {
            *slot += c * reduced_phasor(clock.grid_indices()[i] as u64, xi);
        }
    }
    let chi = effect_i.apply(&phi_i);
    let chi_norm_sqr: f64 = chi.iter().map(|a| a.norm_sqr()).sum();
    if chi_norm_sqr <= 1e-28 {
        return Err(Error::UndefinedConditional);
    }

    // collapsed global state |t_i> (x) chi, swept over the offset grid and
    // re-conditioned on t_f
    let xf = t_f / period;
    let mut num = 0.0;
    let mut den = 0.0;
    for q in 0..theta_steps as u64 {
        let tau = q as f64 * period / theta_steps as f64;
        let mut phi_f = vec![Complex64::ZERO; d_s];
        for (i, &r) in clock.grid_indices().iter().enumerate() {
            debug_assert_eq!(r as usize, i);
            // <E_i|t_i> e^{-i E_i tau} <t_f|E_i> / (p + 1)
            let clock_factor = reduced_phasor(r, xi)
                * grid_phasor(r, q, theta_steps as u64).conj()
                * reduced_phasor(r, xf).conj()
                / d_c as f64;
            for (j, slot) in phi_f.iter_mut().enumerate() {
                let e_j = shell.system().energy(j);
                *slot += clock_factor * chi[j] * phasor(-e_j * tau);
            }
        }
        num += effect_f.expectation(&phi_f);
        den += phi_f.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    if den <= 1e-28 {
        return Err(Error::UndefinedConditional);
    }
    Ok(num / den)
}

/// Collapse-then-evolve oracle for the two-time probability: condition on
/// `t_i`, project, renormalize, evolve the system phases to `t_f`, apply the
/// Born rule.
pub fn two_time_oracle(
    universe: &UniverseState,
    first: (&MeasurementEffect, f64),
    second: (&MeasurementEffect, f64),
) -> Result<f64> {
    let shell = universe.shell();
    let clock = shell.clock();
    let (effect_i, t_i) = first;
    let (effect_f, t_f) = second;
    let d_s = shell.system_dim();
    effect_i.check_dim(d_s)?;
    effect_f.check_dim(d_s)?;
    let xi = t_i / clock.period();
    let mut phi = vec![Complex64::ZERO; d_s];
    for (j, slot) in phi.iter_mut().enumerate() {
        for (&i, c) in shell.window(j).iter().zip(universe.coeffs(j)) {
            *slot += c * reduced_phasor(clock.grid_indices()[i], xi);
        }
    }
    let mut chi = effect_i.apply(&phi);
    let n: f64 = chi.iter().map(|a| a.norm_sqr()).sum();
    if n <= 1e-28 {
        return Err(Error::UndefinedConditional);
    }
    let scale = n.sqrt();
    for (j, c) in chi.iter_mut().enumerate() {
        *c = *c / scale * phasor(-shell.system().energy(j) * (t_f - t_i));
    }
    Ok(effect_f.expectation(&chi))
}
