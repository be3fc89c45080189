//! Subcommand implementations. Each returns the text it prints so the
//! binary stays a thin shell.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use magnon_core::model::thermal_occupation;
use magnon_core::sweep::{CutoffPolicy, FIGURE_NAMES};
use magnon_core::{
    classify, dressed_spectrum, ensemble_g2, figure_preset, run_sweep, solve_at_cutoff, solve_converged, SweepResult,
    SweepSpec, SystemParams, TrajectoryConfig, TrajectoryEstimate,
};
use serde::Serialize;

use crate::output::{gnuplot_script, real, write_file, write_result, Format};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G2Report {
    pub g2: f64,
    pub mean_number: f64,
    pub cutoff_used: usize,
    pub classification: String,
    pub solver: SolverInfo,
    pub params: SystemParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverInfo {
    pub method: &'static str,
    pub cutoff_policy: CutoffPolicy,
    pub residual: f64,
    pub top_level_population: f64,
}

pub fn g2(p: &SystemParams, policy: CutoffPolicy) -> Result<G2Report, CliError> {
    let sol = match policy {
        CutoffPolicy::Fixed(n) => solve_at_cutoff(&p.with_cutoff(n))?,
        CutoffPolicy::Auto(tol) => solve_converged(p, tol)?,
    };
    Ok(G2Report {
        g2: sol.stats.g2_zero,
        mean_number: sol.stats.mean_number,
        cutoff_used: sol.n_max,
        classification: classify(sol.stats.g2_zero)?.to_string(),
        solver: SolverInfo {
            method: "steady_state",
            cutoff_policy: policy,
            residual: sol.residual,
            top_level_population: sol.stats.top_level_population,
        },
        params: p.with_cutoff(sol.n_max),
    })
}

/// Two-column table of dressed levels and doublet splittings.
pub fn spectrum(p: &SystemParams) -> Result<String, CliError> {
    let s = dressed_spectrum(p)?;
    let mut out = String::from("quantity,value_over_gamma\n");
    for b in &s.blocks {
        for (i, e) in b.levels.iter().enumerate() {
            let _ = writeln!(out, "level_n{}_{i},{}", b.excitations, real(*e));
        }
    }
    for n in [1, 2] {
        if let Some(split) = s.splitting(n) {
            let _ = writeln!(out, "splitting_n{n},{}", real(split));
            let _ = writeln!(out, "half_splitting_n{n},{}", real(split / 2.0));
        }
    }
    Ok(out)
}

/// n_th of a magnon at `omega_ghz` in a bath at `temperature_mk`.
pub fn nth(omega_ghz: f64, temperature_mk: f64) -> Result<f64, CliError> {
    if !(omega_ghz > 0.0) || !(temperature_mk > 0.0) {
        return Err(CliError::Usage(format!(
            "frequency and temperature must be positive, got {omega_ghz} GHz and {temperature_mk} mK"
        )));
    }
    Ok(thermal_occupation(omega_ghz * 1e9, temperature_mk * 1e-3)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub estimate: TrajectoryEstimate,
    pub config: TrajectoryConfig,
    pub cutoff_used: usize,
    pub rng_algorithm: &'static str,
}

pub fn trajectory(
    p: &SystemParams,
    cfg: &TrajectoryConfig,
    policy: CutoffPolicy,
) -> Result<TrajectoryReport, CliError> {
    let n = match policy {
        CutoffPolicy::Fixed(n) => n,
        CutoffPolicy::Auto(tol) => solve_converged(p, tol)?.n_max,
    };
    Ok(TrajectoryReport {
        estimate: ensemble_g2(&p.with_cutoff(n), cfg)?,
        config: *cfg,
        cutoff_used: n,
        rng_algorithm: magnon_core::trajectory::RNG_ALGORITHM,
    })
}

/// Preset specs of a figure. `fig5` also includes its inset.
pub fn figure_specs(name: &str) -> Result<Vec<SweepSpec>, CliError> {
    let mut specs = figure_preset(name).map_err(|_| {
        CliError::Usage(format!(
            "unknown figure `{name}`; known figures: {}",
            FIGURE_NAMES.join(", ")
        ))
    })?;
    if name == "fig5" {
        specs.extend(figure_preset("fig5_inset")?);
    }
    Ok(specs)
}

/// Runs the specs and writes their files into `dir`. Returns the paths
/// written.
pub fn write_sweeps(
    name: &str,
    specs: &[SweepSpec],
    dir: &Path,
    format: Format,
    plot_script: bool,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut results: Vec<SweepResult> = Vec::with_capacity(specs.len());
    for spec in specs {
        let r = run_sweep(spec)?;
        written.push(write_result(dir, &r, format)?);
        written.push(dir.join(format!("{}.provenance.json", r.spec.label)));
        results.push(r);
    }
    if plot_script {
        if format != Format::Csv {
            return Err(CliError::Usage(
                "--plot-script reads CSV files; use --format csv".into(),
            ));
        }
        // Curves of a figure share one plot; a separate inset gets its own.
        let (main, inset): (Vec<SweepResult>, Vec<SweepResult>) =
            results.into_iter().partition(|r| !r.spec.label.ends_with("_inset"));
        for (stem, group) in [(name.to_string(), main), (format!("{name}_inset"), inset)] {
            if group.is_empty() {
                continue;
            }
            let path = dir.join(format!("{stem}.gp"));
            write_file(&path, &gnuplot_script(&stem, &group))?;
            written.push(path);
        }
    }
    Ok(written)
}
