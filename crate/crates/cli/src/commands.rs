//! Subcommand implementations. Each builds its inputs from the config, runs
//! the study, writes CSV/JSON artifacts plus a manifest, and fails with an
//! invariant error if an in-run check does not hold.

use std::fmt::Write as _;
use std::path::Path;

use chronoshell::dynamics::{nonlocal_residual, norm_at, schrodinger_fidelity};
use chronoshell::gppt::{single_time_probability, MeasurementEffect};
use chronoshell::thermo::typicality_census;
use chronoshell::timegrid::{identity_residual, orthogonality_integral, TimeGrid};
use chronoshell::toymodel::{
    oscillator_universe, position_alpha_form, position_expectation, position_first_order,
    position_matrix_element, OscillatorConfig,
};
use chronoshell::universe::{sample_universe, support_sets, EnergyShell, UniverseState};
use chronoshell::ClockSpectrum;

use crate::config::RunConfig;
use crate::manifest::RunDir;
use crate::RunError;

fn config_value(config: &RunConfig) -> Result<serde_json::Value, RunError> {
    serde_json::to_value(config).map_err(|e| RunError::Io(format!("config echo: {e}")))
}

fn grid_for(config: &RunConfig, clock: &ClockSpectrum) -> Result<TimeGrid, RunError> {
    match config.grid {
        Some(g) => TimeGrid::new(g.t0, g.samples).map_err(|e| RunError::Config(format!("grid: {e}"))),
        None => Ok(TimeGrid::critical(clock)),
    }
}

fn build_shell(config: &RunConfig, clock: &ClockSpectrum) -> Result<EnergyShell, RunError> {
    let shell = config.shell_section()?;
    support_sets(clock, &config.system()?, shell.energy, shell.delta)
        .map_err(|e| RunError::Config(format!("shell: {e}")))
}

fn seeded_universe(config: &RunConfig, clock: &ClockSpectrum) -> Result<UniverseState, RunError> {
    Ok(sample_universe(&build_shell(config, clock)?, config.seed))
}

/// Frame-identity and orthogonality residuals for the configured clock/grid.
pub fn identity_check(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let clock = config.clock.build()?;
    let grid = grid_for(config, &clock)?;
    let residual = identity_residual(&clock, &grid);

    // exhaustive pairs only at small dimension; the quadrature is O(d^2 n)
    let mut ortho_worst = 0.0f64;
    let n_quad = clock.top_index() as usize + 1;
    if clock.dim() <= 64 {
        for i in 0..clock.dim() {
            for k in 0..clock.dim() {
                let check = orthogonality_integral(&clock, i, k, n_quad);
                ortho_worst = ortho_worst.max(check.residual());
            }
        }
    }

    let mut csv = String::from("check,value\n");
    let _ = writeln!(csv, "identity_residual,{residual:.16e}");
    let _ = writeln!(csv, "orthogonality_residual,{ortho_worst:.16e}");
    let _ = writeln!(csv, "samples,{}", grid.samples());
    let _ = writeln!(csv, "clock_dim,{}", clock.dim());

    let mut run = RunDir::create(out)?;
    run.write("identity.csv", &csv)?;
    run.finish("identity-check", &config_value(config)?)?;

    if grid.is_anti_aliased(&clock) && residual > 1e-12 {
        return Err(RunError::Invariant(format!(
            "identity_residual: {residual:.3e} exceeds 1e-12 on a resolving grid"
        )));
    }
    if !grid.is_anti_aliased(&clock) {
        return Err(RunError::Invariant(format!(
            "identity_residual: grid with {} samples cannot resolve top index {}",
            grid.samples(),
            clock.top_index()
        )));
    }
    if ortho_worst > 1e-12 * clock.period() {
        return Err(RunError::Invariant(format!(
            "orthogonality_residual: {ortho_worst:.3e} exceeds 1e-12 * period"
        )));
    }
    println!("identity residual {residual:.3e}, orthogonality residual {ortho_worst:.3e}");
    Ok(())
}

/// Census of random universes on one shell.
pub fn typicality(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let clock = config.clock.build()?;
    let shell = build_shell(config, &clock)?;
    let census = config
        .census
        .ok_or_else(|| RunError::Config("missing `census` section".into()))?;
    let report = typicality_census(&shell, census.samples, config.seed, census.beta_ref)
        .map_err(|e| RunError::Config(format!("census: {e}")))?;

    let mut csv = String::from("seed,dist_gibbs,dist_omega,beta_fit,norm\n");
    for s in &report.samples {
        let _ = writeln!(
            csv,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.seed, s.dist_gibbs, s.dist_omega, s.beta_fit, s.norm_check
        );
    }
    let summary = serde_json::json!({
        "samples": report.n_samples(),
        "shell_states": report.shell_states,
        "min_window": report.min_window,
        "mean_dist_gibbs": report.mean_dist_gibbs,
        "max_dist_gibbs": report.max_dist_gibbs,
        "std_dist_gibbs": report.std_dist_gibbs,
        "mean_dist_omega": report.mean_dist_omega,
        "max_dist_omega": report.max_dist_omega,
        "std_dist_omega": report.std_dist_omega,
        "beta_mean_populations": report.beta_mean_populations,
    });

    let mut run = RunDir::create(out)?;
    run.write("census.csv", &csv)?;
    run.write(
        "summary.json",
        &serde_json::to_string_pretty(&summary).map_err(|e| RunError::Io(e.to_string()))?,
    )?;
    run.finish("typicality", &config_value(config)?)?;

    for s in &report.samples {
        if (s.norm_check - 1.0).abs() > 1e-9 {
            return Err(RunError::Invariant(format!(
                "universe_norm: seed {} has squared norm {}",
                s.seed, s.norm_check
            )));
        }
    }
    println!(
        "census: {} samples, mean distance to canonical {:.4}, to shell reduction {:.4}",
        report.n_samples(),
        report.mean_dist_gibbs,
        report.mean_dist_omega
    );
    Ok(())
}

/// Norm, fidelity-to-unitary, and evolution-equation residual along a sweep.
pub fn dynamics(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let clock = config.clock.build()?;
    let universe = seeded_universe(config, &clock)?;
    let grid = grid_for(config, &clock)?;
    let times = config.sweep_section()?.times()?;
    let t0 = times[0];

    let mut worst_residual = 0.0f64;
    let mut csv = String::from("t,norm,fidelity,residual\n");
    for &t in &times {
        let norm = norm_at(&universe, t);
        let fidelity = schrodinger_fidelity(&universe, t0, t)
            .map_err(|e| RunError::Invariant(format!("fidelity: {e}")))?;
        let residual = nonlocal_residual(&universe, t, &grid)
            .map_err(|e| RunError::Config(format!("grid: {e}")))?;
        worst_residual = worst_residual.max(residual);
        let _ = writeln!(csv, "{t:.16e},{norm:.16e},{fidelity:.16e},{residual:.16e}");
    }

    let mut run = RunDir::create(out)?;
    run.write("dynamics.csv", &csv)?;
    run.finish("dynamics", &config_value(config)?)?;

    if worst_residual > 1e-9 {
        return Err(RunError::Invariant(format!(
            "evolution_residual: {worst_residual:.3e} exceeds 1e-9"
        )));
    }
    println!(
        "dynamics: {} samples, worst evolution residual {worst_residual:.3e}",
        times.len()
    );
    Ok(())
}

/// Oscillator position curves: exact, first order, and the running norm.
pub fn toy(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let clock = config.clock.build()?;
    let section = config
        .oscillator
        .ok_or_else(|| RunError::Config("missing `oscillator` section".into()))?;
    let osc = OscillatorConfig::new(section.mass, section.omega, section.ground_energy)
        .map_err(|e| RunError::Config(format!("oscillator: {e}")))?;
    let shell = config.shell_section()?;
    let universe = oscillator_universe(&clock, &osc, shell.energy, shell.delta, config.seed)
        .map_err(|e| RunError::Config(format!("oscillator shell: {e}")))?;
    let times = config.sweep_section()?.times()?;

    let mut worst_gap = 0.0f64;
    let mut csv = String::from("t,x_exact,x_first_order,norm\n");
    for &t in &times {
        let exact = position_expectation(&universe, &osc, t).expect("two-level by construction");
        let alpha = position_alpha_form(&universe, &osc, t).expect("two-level by construction");
        let matrix = position_matrix_element(&universe, &osc, t).expect("two-level by construction");
        worst_gap = worst_gap.max((exact - alpha).abs()).max((exact - matrix).abs());
        let first = position_first_order(&universe, &osc, t).expect("two-level by construction");
        let norm = norm_at(&universe, t);
        let _ = writeln!(csv, "{t:.16e},{exact:.16e},{first:.16e},{norm:.16e}");
    }

    let mut run = RunDir::create(out)?;
    run.write("toy.csv", &csv)?;
    run.finish("toy", &config_value(config)?)?;

    if worst_gap > 1e-12 {
        return Err(RunError::Invariant(format!(
            "position_paths: evaluation paths disagree by {worst_gap:.3e}"
        )));
    }
    println!("toy: {} samples, worst path disagreement {worst_gap:.3e}", times.len());
    Ok(())
}

/// Clock-conditioned outcome probabilities for the basis projectors.
pub fn gppt(config: &RunConfig, out: &Path) -> Result<(), RunError> {
    let clock = config.clock.build()?;
    let universe = seeded_universe(config, &clock)?;
    let probes = config
        .probes
        .as_ref()
        .ok_or_else(|| RunError::Config("missing `probes` section".into()))?;
    let d_s = universe.shell().system_dim();
    let theta_steps = probes
        .theta_steps
        .unwrap_or(clock.top_index() as usize + 1);
    let effects: Vec<MeasurementEffect> = (0..d_s)
        .map(|j| MeasurementEffect::basis(format!("level_{j}"), d_s, j).expect("index in range"))
        .collect();

    let mut worst_total = 0.0f64;
    let mut csv = String::from("t,outcome,probability\n");
    for &t in &probes.times {
        let mut total = 0.0;
        for effect in &effects {
            let p = single_time_probability(&universe, effect, t, theta_steps)
                .map_err(|e| RunError::Config(format!("probability at t={t}: {e}")))?;
            total += p;
            let _ = writeln!(csv, "{t:.16e},{},{p:.16e}", effect.label());
        }
        worst_total = worst_total.max((total - 1.0).abs());
    }

    let mut run = RunDir::create(out)?;
    run.write("probabilities.csv", &csv)?;
    run.finish("gppt", &config_value(config)?)?;

    if worst_total > 1e-9 {
        return Err(RunError::Invariant(format!(
            "completeness: basis probabilities deviate from 1 by {worst_total:.3e}"
        )));
    }
    println!(
        "gppt: {} probe times, completeness deviation {worst_total:.3e}",
        probes.times.len()
    );
    Ok(())
}

/// Minimum resolvable energy step for a finite-duration clock, in joules.
pub fn cosmo(t_universe: f64, out: &Path) -> Result<(), RunError> {
    let bound = crate::cosmo_bound(t_universe)?;
    let summary = serde_json::json!({
        "t_universe_seconds": t_universe,
        "bound_joules": bound,
    });
    let mut run = RunDir::create(out)?;
    run.write(
        "cosmo.json",
        &serde_json::to_string_pretty(&summary).map_err(|e| RunError::Io(e.to_string()))?,
    )?;
    run.finish(
        "cosmo",
        &serde_json::json!({ "t_universe_seconds": t_universe }),
    )?;
    println!("minimum energy step: {bound:.6e} J");
    Ok(())
}
