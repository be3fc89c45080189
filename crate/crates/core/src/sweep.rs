//! Parameter grids over the model and the figure presets built from them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::liouville::{solve_at_cutoff, solve_converged};
use crate::model::SystemParams;
use crate::trajectory::{ensemble_g2, TrajectoryConfig, RNG_ALGORITHM};

/// Default relative g² tolerance of the automatic cutoff.
pub const DEFAULT_G2_TOLERANCE: f64 = 1e-3;

/// Names accepted by [`figure_preset`].
pub const FIGURE_NAMES: [&str; 8] = [
    "fig2a",
    "fig2b",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig4d",
    "fig5",
    "fig5_inset",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    /// Sets Δ_q = Δ_m jointly.
    Delta,
    GQm,
    OmegaDrive,
    XiProbe,
    NTh,
}

impl AxisParam {
    /// Column name used in data files.
    pub fn column(&self) -> &'static str {
        match self {
            AxisParam::Delta => "delta_over_gamma",
            AxisParam::GQm => "g_qm_over_gamma",
            AxisParam::OmegaDrive => "omega_over_gamma",
            AxisParam::XiProbe => "xi_p_over_gamma",
            AxisParam::NTh => "n_th",
        }
    }

    pub fn apply(&self, p: &mut SystemParams, v: f64) {
        match self {
            AxisParam::Delta => {
                p.delta_q = v;
                p.delta_m = v;
            }
            AxisParam::GQm => p.g_qm = v,
            AxisParam::OmegaDrive => p.omega_drive = v,
            AxisParam::XiProbe => p.xi_probe = v,
            AxisParam::NTh => p.n_th = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Self {
            param,
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Self {
            param,
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let name = self.param.column();
        if self.count < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis {name}: count must be at least 2, got {}",
                self.count
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            return Err(Error::InvalidSweep(format!(
                "axis {name}: need finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::InvalidSweep(format!(
                "axis {name}: log spacing needs min > 0, got {}",
                self.min
            )));
        }
        Ok(())
    }

    /// Grid values; both endpoints are reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let s = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * s,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                }
            })
            .collect()
    }

    /// Distance between neighbouring points of a linear axis.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SolverChoice {
    Deterministic,
    Trajectory(TrajectoryConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffPolicy {
    Fixed(usize),
    /// Relative g² tolerance of the escalation test.
    Auto(f64),
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Auto(DEFAULT_G2_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Identifies the curve or map in file names.
    pub label: String,
    pub base: SystemParams,
    pub axes: Vec<Axis>,
    pub solver: SolverChoice,
    #[serde(default)]
    pub cutoff: CutoffPolicy,
    /// Remarks carried into the provenance block.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep(format!(
                "expected 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep("both axes set the same parameter".into()));
        }
        for a in &self.axes {
            a.validate()?;
        }
        self.base.validate()?;
        match self.cutoff {
            CutoffPolicy::Fixed(n) if n < 1 => {
                return Err(Error::InvalidSweep("fixed cutoff must be at least 1".into()))
            }
            CutoffPolicy::Auto(tol) if !(tol > 0.0) => {
                return Err(Error::InvalidSweep(format!(
                    "auto cutoff tolerance must be positive, got {tol}"
                )))
            }
            _ => {}
        }
        if let SolverChoice::Trajectory(cfg) = &self.solver {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    /// Every grid point in row-major order (last axis fastest).
    pub fn grid(&self) -> Vec<(Vec<f64>, SystemParams)> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let total: usize = values.iter().map(Vec::len).product();
        (0..total)
            .map(|mut k| {
                let mut coords = vec![0.0; values.len()];
                for d in (0..values.len()).rev() {
                    let n = values[d].len();
                    coords[d] = values[d][k % n];
                    k /= n;
                }
                let mut p = self.base;
                for (axis, &v) in self.axes.iter().zip(&coords) {
                    axis.param.apply(&mut p, v);
                }
                (coords, p)
            })
            .collect()
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("sweep spec serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    NoExcitation,
    TruncationFailed,
    /// Any other numerical failure (singular solve, integrator breakdown).
    SolverFailed,
}

impl PointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::NoExcitation => "no-excitation",
            PointStatus::TruncationFailed => "truncation-failed",
            PointStatus::SolverFailed => "solver-failed",
        }
    }

    fn of_error(e: &Error) -> Self {
        match e {
            Error::NoExcitation(_) => PointStatus::NoExcitation,
            Error::Truncation { .. } => PointStatus::TruncationFailed,
            _ => PointStatus::SolverFailed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub coords: Vec<f64>,
    pub g2: Option<f64>,
    pub mean_number: Option<f64>,
    pub cutoff_used: Option<usize>,
    /// Steady-state residual (deterministic) or bootstrap g² standard error
    /// (trajectory).
    pub solver_metric: Option<f64>,
    pub status: PointStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl PointResult {
    fn failed(coords: Vec<f64>, e: &Error) -> Self {
        Self {
            coords,
            g2: None,
            mean_number: None,
            cutoff_used: None,
            solver_metric: None,
            status: PointStatus::of_error(e),
            message: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_hash: String,
    pub code_version: String,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub rng_algorithm: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub points: Vec<PointResult>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn column_names(&self) -> Vec<&'static str> {
        self.spec.axes.iter().map(|a| a.param.column()).collect()
    }
}

/// Evaluates one grid point; failures are returned as a status.
pub fn evaluate_point(spec: &SweepSpec, coords: Vec<f64>, p: &SystemParams) -> PointResult {
    match try_point(spec, p) {
        Ok((g2, n, cutoff, metric)) => PointResult {
            coords,
            g2: Some(g2),
            mean_number: Some(n),
            cutoff_used: Some(cutoff),
            solver_metric: Some(metric),
            status: PointStatus::Ok,
            message: None,
        },
        Err(e) => PointResult::failed(coords, &e),
    }
}

fn try_point(spec: &SweepSpec, p: &SystemParams) -> Result<(f64, f64, usize, f64)> {
    match &spec.solver {
        SolverChoice::Deterministic => {
            let sol = match spec.cutoff {
                CutoffPolicy::Fixed(n) => solve_at_cutoff(&p.with_cutoff(n))?,
                CutoffPolicy::Auto(tol) => solve_converged(p, tol)?,
            };
            Ok((sol.stats.g2_zero, sol.stats.mean_number, sol.n_max, sol.residual))
        }
        SolverChoice::Trajectory(cfg) => {
            let n = match spec.cutoff {
                CutoffPolicy::Fixed(n) => n,
                CutoffPolicy::Auto(tol) => solve_converged(p, tol)?.n_max,
            };
            let est = ensemble_g2(&p.with_cutoff(n), cfg)?;
            Ok((est.g2_mean, est.n_mean, n, est.g2_stderr))
        }
    }
}

#[cfg(feature = "parallel")]
fn evaluate_all(spec: &SweepSpec, grid: Vec<(Vec<f64>, SystemParams)>) -> Vec<PointResult> {
    use rayon::prelude::*;
    grid.into_par_iter()
        .map(|(coords, p)| evaluate_point(spec, coords, &p))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all(spec: &SweepSpec, grid: Vec<(Vec<f64>, SystemParams)>) -> Vec<PointResult> {
    grid.into_iter()
        .map(|(coords, p)| evaluate_point(spec, coords, &p))
        .collect()
}

/// Evaluates every grid point. Only spec validation errors are returned;
/// per-point failures are recorded in the point status.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points = evaluate_all(spec, spec.grid());
    let (seed, rng_algorithm) = match &spec.solver {
        SolverChoice::Trajectory(cfg) => (Some(cfg.rng_seed), Some(RNG_ALGORITHM.to_string())),
        SolverChoice::Deterministic => (None, None),
    };
    Ok(SweepResult {
        spec: spec.clone(),
        shape: spec.shape(),
        points,
        provenance: Provenance {
            spec_hash: spec.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed,
            rng_algorithm,
            notes: spec.notes.clone(),
        },
    })
}

/// Default Δ axis: [−30, 30], 241 points.
pub fn default_delta_axis() -> Axis {
    Axis::linear(AxisParam::Delta, -30.0, 30.0, 241)
}

/// Default g_qm axis: [0, 30], 121 points.
pub fn default_coupling_axis() -> Axis {
    Axis::linear(AxisParam::GQm, 0.0, 30.0, 121)
}

/// Default g_qm axis of the thermal curves: [5, 25], 81 points. Outside it
/// the cold curve bunches above the warm ones: near g_qm = ξ_pΔ/Ω the two
/// single-magnon drive paths cancel, and past g_qm ≈ 26.5 the probe at
/// Δ = 21 nears the two-magnon resonance g_qm = √2·21.
pub fn default_thermal_coupling_axis() -> Axis {
    Axis::linear(AxisParam::GQm, 5.0, 25.0, 81)
}

/// Default Ω axis: [0.01, 20], 81 log-spaced points.
pub fn default_omega_axis() -> Axis {
    Axis::log(AxisParam::OmegaDrive, 0.01, 20.0, 81)
}

/// Default ξ_p axis: [1e-4, 2], 81 log-spaced points.
pub fn default_xi_axis() -> Axis {
    Axis::log(AxisParam::XiProbe, 1e-4, 2.0, 81)
}

/// Default n_th axis: [1e-9, 1e-1], 49 log-spaced points.
pub fn default_nth_axis() -> Axis {
    Axis::log(AxisParam::NTh, 1e-9, 1e-1, 49)
}

fn defaulted_note(axes: &[Axis]) -> Vec<String> {
    axes.iter()
        .map(|a| {
            format!(
                "axis {} range [{}, {}] x {} ({:?}) is a default; the figure does not state it",
                a.param.column(),
                a.min,
                a.max,
                a.count,
                a.spacing
            )
        })
        .collect()
}

fn curve(label: String, base: SystemParams, axes: Vec<Axis>) -> SweepSpec {
    let notes = defaulted_note(&axes);
    SweepSpec {
        label,
        base,
        axes,
        solver: SolverChoice::Deterministic,
        cutoff: CutoffPolicy::default(),
        notes,
    }
}

fn tag(v: f64) -> String {
    v.to_string().replace('.', "p")
}

/// Parameter bindings of a published figure, one spec per curve or map.
pub fn figure_preset(name: &str) -> Result<Vec<SweepSpec>> {
    let base = SystemParams::blockade_defaults();
    let specs = match name {
        "fig2a" => vec![curve(
            "fig2a".into(),
            base,
            vec![default_delta_axis(), default_coupling_axis()],
        )],
        "fig2b" => vec![curve(
            "fig2b".into(),
            base,
            vec![default_omega_axis(), default_xi_axis()],
        )],
        "fig4a" => [0.1, 2.0, 10.0]
            .into_iter()
            .map(|omega| {
                curve(
                    format!("fig4a_omega_{}", tag(omega)),
                    SystemParams {
                        omega_drive: omega,
                        ..base
                    },
                    vec![default_delta_axis()],
                )
            })
            .collect(),
        "fig4b" => [14.8, 0.0, 21.0]
            .into_iter()
            .map(|delta| {
                curve(
                    format!("fig4b_delta_{}", tag(delta)),
                    base.with_delta(delta),
                    vec![default_omega_axis()],
                )
            })
            .collect(),
        "fig4c" => [0.033, 0.06, 1.0]
            .into_iter()
            .map(|xi| {
                curve(
                    format!("fig4c_xi_{}", tag(xi)),
                    SystemParams { xi_probe: xi, ..base },
                    vec![default_delta_axis()],
                )
            })
            .collect(),
        "fig4d" => [14.8, 0.0, 21.0]
            .into_iter()
            .map(|delta| {
                curve(
                    format!("fig4d_delta_{}", tag(delta)),
                    base.with_delta(delta),
                    vec![default_xi_axis()],
                )
            })
            .collect(),
        "fig5" => [0.0, 1e-4, 1e-3]
            .into_iter()
            .map(|n_th| {
                curve(
                    format!("fig5_nth_{n_th:e}"),
                    SystemParams { n_th, ..base },
                    vec![default_thermal_coupling_axis()],
                )
            })
            .collect(),
        "fig5_inset" => vec![curve("fig5_inset".into(), base, vec![default_nth_axis()])],
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(specs)
}

/// Index of the smallest `Ok` value among `points[range]`.
pub fn argmin_g2(points: &[PointResult]) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.g2.map(|g| (i, g)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::solve_converged;

    fn delta_scan(count: usize) -> SweepSpec {
        SweepSpec {
            label: "t".into(),
            base: SystemParams::blockade_defaults(),
            axes: vec![Axis::linear(AxisParam::Delta, -30.0, 30.0, count)],
            solver: SolverChoice::Deterministic,
            cutoff: CutoffPolicy::Fixed(4),
            notes: vec![],
        }
    }

    #[test]
    fn axis_values() {
        let a = Axis::linear(AxisParam::Delta, -30.0, 30.0, 241);
        let v = a.values();
        assert_eq!(v.len(), 241);
        assert_eq!(v[0], -30.0);
        assert_eq!(v[240], 30.0);
        assert!((v[120]).abs() < 1e-12);
        assert!((a.step() - 0.25).abs() < 1e-15);
        let l = Axis::log(AxisParam::XiProbe, 1e-4, 2.0, 81).values();
        assert_eq!(l[0], 1e-4);
        assert_eq!(l[80], 2.0);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation() {
        assert!(delta_scan(2).validate().is_ok());
        assert!(delta_scan(1).validate().is_err());
        let mut s = delta_scan(5);
        s.axes[0].min = 40.0;
        assert!(s.validate().is_err());
        let mut s = delta_scan(5);
        s.axes[0].spacing = Spacing::Log;
        assert!(s.validate().is_err());
        let mut s = delta_scan(5);
        s.axes.push(s.axes[0]);
        assert!(s.validate().is_err());
        let mut s = delta_scan(5);
        s.axes.clear();
        assert!(s.validate().is_err());
        let mut s = delta_scan(5);
        s.cutoff = CutoffPolicy::Auto(0.0);
        assert!(matches!(run_sweep(&s), Err(Error::InvalidSweep(_))));
    }

    #[test]
    fn grid_is_row_major() {
        let s = SweepSpec {
            axes: vec![
                Axis::linear(AxisParam::Delta, 0.0, 1.0, 2),
                Axis::linear(AxisParam::GQm, 5.0, 7.0, 3),
            ],
            ..delta_scan(2)
        };
        let g = s.grid();
        let coords: Vec<Vec<f64>> = g.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(
            coords,
            vec![
                vec![0.0, 5.0],
                vec![0.0, 6.0],
                vec![0.0, 7.0],
                vec![1.0, 5.0],
                vec![1.0, 6.0],
                vec![1.0, 7.0]
            ]
        );
        assert_eq!(g[4].1.delta_q, 1.0);
        assert_eq!(g[4].1.delta_m, 1.0);
        assert_eq!(g[4].1.g_qm, 6.0);
    }

    #[test]
    fn single_point_matches_standalone() {
        let s = SweepSpec {
            axes: vec![Axis::linear(AxisParam::Delta, 21.0, 21.0 + 1e-12, 2)],
            cutoff: CutoffPolicy::Auto(1e-3),
            ..delta_scan(2)
        };
        let r = run_sweep(&s).unwrap();
        let direct = solve_converged(&SystemParams::blockade_defaults(), 1e-3).unwrap();
        assert_eq!(r.points[0].g2, Some(direct.stats.g2_zero));
        assert_eq!(r.points[0].cutoff_used, Some(direct.n_max));
    }

    #[test]
    fn failures_are_recorded_in_band() {
        let s = SweepSpec {
            base: SystemParams::blockade_defaults().without_drives(),
            axes: vec![Axis::linear(AxisParam::OmegaDrive, 0.0, 1.0, 2)],
            ..delta_scan(2)
        };
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.points[0].status, PointStatus::NoExcitation);
        assert_eq!(r.points[0].g2, None);
        assert_eq!(r.points[1].status, PointStatus::Ok);
    }

    #[test]
    fn sweep_is_deterministic_and_hashed() {
        let s = delta_scan(9);
        let a = run_sweep(&s).unwrap();
        let b = run_sweep(&s).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.provenance.spec_hash, b.provenance.spec_hash);
        assert_eq!(a.provenance.spec_hash.len(), 64);
        let mut other = s.clone();
        other.base.kappa_q = 1.3;
        assert_ne!(other.hash(), s.hash());
    }

    #[test]
    fn detuning_symmetry_with_single_drive() {
        // Only with one of the two drives on is the map Δ → −Δ a symmetry.
        for (omega, xi) in [(0.0, 0.05), (0.3, 0.0)] {
            let s = SweepSpec {
                base: SystemParams {
                    omega_drive: omega,
                    xi_probe: xi,
                    ..SystemParams::blockade_defaults()
                },
                ..delta_scan(13)
            };
            let r = run_sweep(&s).unwrap();
            let n = r.points.len();
            for i in 0..n / 2 {
                let (a, b) = (r.points[i].g2, r.points[n - 1 - i].g2);
                match (a, b) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()), "{a} vs {b}"),
                    _ => assert_eq!(r.points[i].status, r.points[n - 1 - i].status),
                }
            }
        }
    }

    #[test]
    fn presets() {
        for name in FIGURE_NAMES {
            let specs = figure_preset(name).unwrap();
            for s in &specs {
                s.validate().unwrap();
                assert!(!s.notes.is_empty());
            }
        }
        let b = &figure_preset("fig2b").unwrap()[0];
        assert_eq!(b.axes[0].param, AxisParam::OmegaDrive);
        assert_eq!(b.axes[1].param, AxisParam::XiProbe);
        assert_eq!(
            (b.base.delta_q, b.base.g_qm, b.base.kappa_m, b.base.kappa_q, b.base.n_th),
            (21.0, 21.0, 1.4, 1.2, 0.0)
        );
        let f5 = figure_preset("fig5").unwrap();
        assert_eq!(
            f5.iter().map(|s| s.base.n_th).collect::<Vec<_>>(),
            vec![0.0, 1e-4, 1e-3]
        );
        assert!(f5.iter().all(|s| s.axes[0].param == AxisParam::GQm
            && s.base.delta_q == 21.0
            && s.base.omega_drive == 0.1
            && s.base.xi_probe == 0.001));
        let c = figure_preset("fig4c").unwrap();
        assert_eq!(
            c.iter().map(|s| s.base.xi_probe).collect::<Vec<_>>(),
            vec![0.033, 0.06, 1.0]
        );
        assert!(c
            .iter()
            .all(|s| s.base.omega_drive == 0.1 && s.axes[0].param == AxisParam::Delta));
        assert!(matches!(figure_preset("fig9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let mut s = figure_preset("fig4a").unwrap().remove(0);
        s.solver = SolverChoice::Trajectory(TrajectoryConfig::for_params(&s.base));
        s.cutoff = CutoffPolicy::Fixed(6);
        let text = serde_json::to_string(&s).unwrap();
        let back: SweepSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.hash(), s.hash());
    }

    #[test]
    fn thermal_curve_order_and_its_limits() {
        let specs = figure_preset("fig5").unwrap();
        let run = |s: &SweepSpec| -> Vec<f64> {
            let mut s = s.clone();
            s.axes[0].count = 21;
            run_sweep(&s).unwrap().points.iter().map(|p| p.g2.unwrap()).collect()
        };
        let (cold, warm) = (run(&specs[0]), run(&specs[2]));
        assert!(cold.iter().zip(&warm).all(|(c, w)| c < w));
        let base = specs[0].base;
        let at = |g_qm: f64, n_th: f64| {
            solve_converged(&SystemParams { g_qm, n_th, ..base }, 1e-3)
                .unwrap()
                .stats
                .g2_zero
        };
        // drive-path cancellation, then the two-magnon resonance
        for g in [base.xi_probe * base.delta_q / base.omega_drive, 2f64.sqrt() * 21.0] {
            assert!(at(g, 0.0) > 10.0 * at(g, 1e-3), "g_qm = {g}");
        }
    }
}
