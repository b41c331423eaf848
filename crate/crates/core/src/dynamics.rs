//! Conditioned dynamics of the system relative to the clock.
//!
//! The relative state at clock time `t` is `<t|Psi>`. With all clock
//! energies measured from the shell floor `E`, it takes the closed form
//! `sum_j alpha_j(t) e^{-i E_j t} |E_j>` with
//! `alpha_j(t) = sum_{i in I_j} c_ij e^{i Delta_ij t}`. The closed form is
//! the solution; the time non-local evolution equation is verified by
//! residual.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::phasor;
use crate::timegrid::{grid_conditioning_phase, TimeGrid};
use crate::universe::UniverseState;

/// Relative state of the system at clock time `t`, unnormalized.
#[derive(Debug, Clone)]
pub struct RelativeState {
    pub t: f64,
    /// `alpha_j(t) e^{-i E_j t}` per system level.
    pub amplitudes: Vec<Complex64>,
    /// The `alpha_j(t)` factors alone.
    pub alpha: Vec<Complex64>,
}

impl RelativeState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Copy with unit norm.
    pub fn normalized(&self) -> Result<RelativeState> {
        let n = self.norm_sqr().sqrt();
        if n <= 1e-150 {
            return Err(Error::ZeroNormState);
        }
        Ok(RelativeState {
            t: self.t,
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
            alpha: self.alpha.iter().map(|a| a / n).collect(),
        })
    }
}

/// Closed-form relative state: `alpha_j(t) e^{-i E_j t}` with the global
/// `e^{-i E t}` phase already removed.
pub fn relative_state(universe: &UniverseState, t: f64) -> RelativeState {
    let shell = universe.shell();
    let d_s = shell.system_dim();
    let mut alpha = Vec::with_capacity(d_s);
    let mut amplitudes = Vec::with_capacity(d_s);
    for j in 0..d_s {
        let mut a = Complex64::new(0.0, 0.0);
        for (c, &d) in universe.coeffs(j).iter().zip(shell.detunings(j)) {
            a += c * phasor(d * t);
        }
        alpha.push(a);
        amplitudes.push(a * phasor(-shell.system().energy(j) * t));
    }
    RelativeState {
        t,
        amplitudes,
        alpha,
    }
}

/// Direct conditioning `<t|Psi>`: the sum over clock levels with their
/// absolute phases `e^{+i E_i t}`. Equals the closed form times the global
/// phase `e^{+i E t}`; the two paths share no code.
pub fn conditioned_direct(universe: &UniverseState, t: f64) -> Vec<Complex64> {
    let shell = universe.shell();
    let clock = shell.clock();
    let x = t / clock.period();
    let mut out = Vec::with_capacity(shell.system_dim());
    for j in 0..shell.system_dim() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&i, c) in shell.window(j).iter().zip(universe.coeffs(j)) {
            acc += c * crate::numeric::reduced_phasor(clock.grid_indices()[i], x);
        }
        out.push(acc);
    }
    out
}

/// `<t_m|Psi>` on a grid sample, with the `m`-dependent phases reduced in
/// integer arithmetic. Equals `e^{+i E t_m}` times the closed form; the
/// global phase drops out of every density-matrix average built from it.
pub fn conditioned_on_grid(universe: &UniverseState, grid: &TimeGrid, m: u64) -> Vec<Complex64> {
    let shell = universe.shell();
    let clock = shell.clock();
    let mut out = Vec::with_capacity(shell.system_dim());
    for j in 0..shell.system_dim() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&i, c) in shell.window(j).iter().zip(universe.coeffs(j)) {
            acc += c * grid_conditioning_phase(clock, grid, i, m);
        }
        out.push(acc);
    }
    out
}

/// Squared norm of the relative state along `times`, from the cosine
/// double sum over each window. Constant 1 for sharp universes.
pub fn norm_curve(universe: &UniverseState, times: &[f64]) -> Vec<f64> {
    let shell = universe.shell();
    times
        .iter()
        .map(|&t| {
            let mut total = 0.0;
            for j in 0..shell.system_dim() {
                let coeffs = universe.coeffs(j);
                let deltas = shell.detunings(j);
                for (ci, &di) in coeffs.iter().zip(deltas) {
                    for (ck, &dk) in coeffs.iter().zip(deltas) {
                        let dphi = ck.arg() - ci.arg();
                        total += ci.norm() * ck.norm() * ((di - dk) * t - dphi).cos();
                    }
                }
            }
            total
        })
        .collect()
}

/// `N(t)` at a single time.
pub fn norm_at(universe: &UniverseState, t: f64) -> f64 {
    norm_curve(universe, &[t])[0]
}

/// Overlap fidelity between the conditioned state at `t` and the plain
/// Schroedinger evolution of the conditioned state at `t0`. Global phases
/// cancel; both states are normalized inside.
pub fn schrodinger_fidelity(universe: &UniverseState, t0: f64, t: f64) -> Result<f64> {
    let shell = universe.shell();
    let phi0 = relative_state(universe, t0);
    let phi = relative_state(universe, t);
    let n0 = phi0.norm_sqr();
    let n1 = phi.norm_sqr();
    if n0 <= 1e-150 || n1 <= 1e-150 {
        return Err(Error::ZeroNormState);
    }
    let mut inner = Complex64::new(0.0, 0.0);
    for j in 0..shell.system_dim() {
        let evolved = phi0.amplitudes[j] * phasor(-shell.system().energy(j) * (t - t0));
        inner += evolved.conj() * phi.amplitudes[j];
    }
    Ok(inner.norm_sqr() / (n0 * n1))
}

/// Detuning kernel `Delta(t, t') = <t| Delta_hat |t'>`, diagonal on the
/// system because the support windows are disjoint.
#[derive(Debug, Clone)]
pub struct NonlocalKernel {
    /// Per system level: `(Delta_kj, E_k - E)` for each `k in I_j`.
    entries: Vec<Vec<(f64, f64)>>,
}

impl NonlocalKernel {
    pub fn from_universe(universe: &UniverseState) -> Self {
        let shell = universe.shell();
        let entries = (0..shell.system_dim())
            .map(|j| {
                shell
                    .window(j)
                    .iter()
                    .zip(shell.detunings(j))
                    .map(|(&i, &d)| (d, shell.clock().energy(i) - shell.energy()))
                    .collect()
            })
            .collect();
        Self { entries }
    }

    /// True when every detuning vanishes (sharp universe).
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&(d, _)| d == 0.0)
    }

    /// Apply `Delta(t, t')` to a system vector. Energies are measured from
    /// the shell floor, matching the closed-form convention.
    pub fn apply(&self, t: f64, t_prime: f64, v: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .iter()
            .zip(v)
            .map(|(row, &vj)| {
                let mut factor = Complex64::new(0.0, 0.0);
                for &(delta, e_shift) in row {
                    factor += Complex64::new(delta, 0.0) * phasor(e_shift * (t - t_prime));
                }
                factor * vj
            })
            .collect()
    }
}

/// Residual of the time non-local evolution equation at time `t`:
/// max-norm of `i d/dt |phi> - H_S |phi> + (1/T) int dt' Delta(t,t') |phi(t')>`,
/// with the `t'` integral evaluated exactly as a weighted grid sum.
///
/// The time derivative comes from the closed form analytically, never from
/// finite differences.
pub fn nonlocal_residual(universe: &UniverseState, t: f64, grid: &TimeGrid) -> Result<f64> {
    let shell = universe.shell();
    let clock = shell.clock();
    grid.require_anti_aliased(clock)?;
    let d_s = shell.system_dim();
    let n = grid.samples() as u64;

    // left side: i d/dt of the closed form, term by term
    let mut derivative = vec![Complex64::new(0.0, 0.0); d_s];
    for j in 0..d_s {
        let ej = shell.system().energy(j);
        for (c, &d) in universe.coeffs(j).iter().zip(shell.detunings(j)) {
            derivative[j] += c * (ej - d) * phasor(-(ej - d) * t);
        }
    }

    // kernel term: (1/n) sum_m Delta(t, t_m) |phi(t_m)>, with the exactly
    // reduced grid phases paired so the shell-floor phase cancels
    let mut kernel_term = vec![Complex64::new(0.0, 0.0); d_s];
    let x0 = grid.t0() / clock.period();
    for m in 0..n {
        let cond = conditioned_on_grid(universe, grid, m); // e^{+iE t_m} phi(t_m)
        for j in 0..d_s {
            let ej = shell.system().energy(j);
            let mut factor = Complex64::new(0.0, 0.0);
            for (&k, &dk) in shell.window(j).iter().zip(shell.detunings(j)) {
                let rk = clock.grid_indices()[k];
                // e^{i (E_k - E) t} * Delta_kj * e^{-i E_k t_m}; the leftover
                // e^{+i E t_m} sits in `cond`
                let e_shift = dk - ej;
                let tm_phase = (crate::numeric::grid_phasor(rk, m, n)
                    * crate::numeric::reduced_phasor(rk, x0))
                .conj();
                factor += Complex64::new(dk, 0.0) * phasor(e_shift * t) * tm_phase;
            }
            kernel_term[j] += factor * cond[j] / n as f64;
        }
    }

    let phi = relative_state(universe, t);
    let mut worst: f64 = 0.0;
    for j in 0..d_s {
        let rhs = shell.system().energy(j) * phi.amplitudes[j] - kernel_term[j];
        worst = worst.max((derivative[j] - rhs).norm());
    }
    Ok(worst)
}
