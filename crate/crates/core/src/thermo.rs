//! Thermal reductions: partial trace, time average, Gibbs target, trace
//! distance and the typicality census.
//!
//! The equiprobable shell state is never materialized; its reduction is the
//! diagonal of window fractions `|I_j| / N`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::conditioned_on_grid;
use crate::error::{Error, Result};
use crate::numeric::{linear_fit, mean, std_dev};
use crate::spectra::SystemSpectrum;
use crate::timegrid::TimeGrid;
use crate::universe::{sample_universe, EnergyShell, UniverseState};

/// Hermitian, positive semidefinite, unit-trace matrix on the system space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(data: DMatrix<Complex64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::DimensionMismatch {
                a: data.nrows(),
                b: data.ncols(),
            });
        }
        Ok(Self { data })
    }

    pub fn from_diagonal(populations: &[f64]) -> Self {
        let d = populations.len();
        let mut data = DMatrix::zeros(d, d);
        for (j, &p) in populations.iter().enumerate() {
            data[(j, j)] = Complex64::new(p, 0.0);
        }
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, j: usize, l: usize) -> Complex64 {
        self.data[(j, l)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.data[(j, j)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.data[(j, j)].re).collect()
    }

    /// Largest `|rho_jl - conj(rho_lj)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.dim() {
            for l in 0..self.dim() {
                worst = worst.max((self.data[(j, l)] - self.data[(l, j)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = self.data.clone().symmetric_eigen();
        let mut vals: Vec<f64> = sym.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Hermitian to `tol`, eigenvalues above `-tol`, trace within `tol` of 1.
    pub fn check_valid(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        if let Some(min) = self.eigenvalues().first() {
            if *min < -tol {
                return Err(Error::InvalidParameter(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Max-norm of the entrywise difference.
    pub fn max_norm_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                a: self.dim(),
                b: other.dim(),
            });
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.dim() {
            for l in 0..self.dim() {
                worst = worst.max((self.data[(j, l)] - other.data[(j, l)]).norm());
            }
        }
        Ok(worst)
    }
}

/// Partial trace over the clock. Disjoint windows make it diagonal:
/// populations `P_j = sum_{i in I_j} |c_ij|^2`.
pub fn reduced_density_matrix(universe: &UniverseState) -> DensityMatrix {
    let shell = universe.shell();
    let populations: Vec<f64> = (0..shell.system_dim())
        .map(|j| universe.population(j))
        .collect();
    DensityMatrix::from_diagonal(&populations)
}

/// Discrete time average `(1/(s+1)) sum_m |phi(t_m)><phi(t_m)|`, which on an
/// anti-aliased grid reproduces `(1/T) int dt <t|Psi><Psi|t>` exactly.
pub fn time_average_density_matrix(
    universe: &UniverseState,
    grid: &TimeGrid,
) -> Result<DensityMatrix> {
    grid.require_anti_aliased(universe.shell().clock())?;
    Ok(time_average_density_matrix_unchecked(universe, grid))
}

/// Same average without the anti-aliasing guard, for demonstrating what an
/// aliased grid does to the identity.
pub fn time_average_density_matrix_unchecked(
    universe: &UniverseState,
    grid: &TimeGrid,
) -> DensityMatrix {
    let d_s = universe.shell().system_dim();
    let n = grid.samples() as u64;
    let mut data = DMatrix::zeros(d_s, d_s);
    for m in 0..n {
        let phi = conditioned_on_grid(universe, grid, m);
        for j in 0..d_s {
            for l in 0..d_s {
                data[(j, l)] += phi[j] * phi[l].conj() / n as f64;
            }
        }
    }
    DensityMatrix { data }
}

/// Canonical state `e^{-beta E_j} / Z`, computed with a max shift so large
/// `beta` cannot overflow.
pub fn gibbs_state(system: &SystemSpectrum, beta: f64) -> DensityMatrix {
    let shift = system
        .levels()
        .iter()
        .map(|&e| -beta * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = system
        .levels()
        .iter()
        .map(|&e| (-beta * e - shift).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    DensityMatrix::from_diagonal(&weights.iter().map(|w| w / z).collect::<Vec<_>>())
}

/// Reduction of the equiprobable shell state: populations `|I_j| / N`.
pub fn shell_mixed_reduced(shell: &EnergyShell) -> Result<DensityMatrix> {
    let n = shell.total_states();
    if n == 0 {
        return Err(Error::EmptyShell);
    }
    let populations: Vec<f64> = (0..shell.system_dim())
        .map(|j| shell.window(j).len() as f64 / n as f64)
        .collect();
    Ok(DensityMatrix::from_diagonal(&populations))
}

/// Trace distance `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            a: a.dim(),
            b: b.dim(),
        });
    }
    let diff = a.data.clone() - b.data.clone();
    let eig = diff.symmetric_eigen();
    Ok(0.5 * eig.eigenvalues.iter().map(|v| v.abs()).sum::<f64>())
}

/// One census sample.
#[derive(Debug, Clone)]
pub struct CensusSample {
    pub seed: u64,
    pub dist_gibbs: f64,
    pub dist_omega: f64,
    /// Log-linear fit of this sample's populations against `E_j`; NaN when
    /// fewer than two levels carry weight.
    pub beta_fit: f64,
    pub norm_check: f64,
}

/// Aggregate over random universes on a fixed shell.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub samples: Vec<CensusSample>,
    pub shell_states: usize,
    pub min_window: usize,
    pub mean_dist_gibbs: f64,
    pub max_dist_gibbs: f64,
    pub std_dist_gibbs: f64,
    pub mean_dist_omega: f64,
    pub max_dist_omega: f64,
    pub std_dist_omega: f64,
    /// Fit of the census-mean populations against `E_j`.
    pub beta_mean_populations: f64,
}

impl CensusReport {
    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }
}

fn fit_beta(levels: &[f64], populations: &[f64]) -> f64 {
    let points: Vec<(f64, f64)> = levels
        .iter()
        .zip(populations)
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&e, &p)| (e, p.ln()))
        .collect();
    if points.len() < 2 {
        return f64::NAN;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    -linear_fit(&xs, &ys).0
}

/// Sample `n` universes with seeds `seed0 .. seed0 + n - 1` and report the
/// distance of each reduction to the Gibbs target and to the shell-mixed
/// reduction.
pub fn typicality_census(
    shell: &EnergyShell,
    n: usize,
    seed0: u64,
    beta_ref: f64,
) -> Result<CensusReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "census needs at least one sample".into(),
        ));
    }
    let system = shell.system();
    let gibbs = gibbs_state(system, beta_ref);
    let omega = shell_mixed_reduced(shell)?;
    let mut samples = Vec::with_capacity(n);
    let mut mean_populations = vec![0.0; system.dim()];
    for k in 0..n {
        let seed = seed0 + k as u64;
        let u = sample_universe(shell, seed);
        let rho = reduced_density_matrix(&u);
        let populations = rho.diagonal();
        for (acc, p) in mean_populations.iter_mut().zip(&populations) {
            *acc += p / n as f64;
        }
        samples.push(CensusSample {
            seed,
            dist_gibbs: trace_distance(&rho, &gibbs)?,
            dist_omega: trace_distance(&rho, &omega)?,
            beta_fit: fit_beta(system.levels(), &populations),
            norm_check: u.norm_sqr(),
        });
    }
    let gibbs_dists: Vec<f64> = samples.iter().map(|s| s.dist_gibbs).collect();
    let omega_dists: Vec<f64> = samples.iter().map(|s| s.dist_omega).collect();
    Ok(CensusReport {
        shell_states: shell.total_states(),
        min_window: shell.min_window(),
        mean_dist_gibbs: mean(&gibbs_dists),
        max_dist_gibbs: gibbs_dists.iter().copied().fold(0.0, f64::max),
        std_dist_gibbs: std_dev(&gibbs_dists),
        mean_dist_omega: mean(&omega_dists),
        max_dist_omega: omega_dists.iter().copied().fold(0.0, f64::max),
        std_dist_omega: std_dev(&omega_dists),
        beta_mean_populations: fit_beta(system.levels(), &mean_populations),
        samples,
    })
}
