//! TOML run configuration.
//!
//! Every section is optional. Values are resolved with the precedence
//! command line > configuration file > built-in defaults.
//!
//! ```toml
//! cutoff = "auto"          # or an integer n_max
//! g2_tolerance = 1e-3
//!
//! [params]                 # γ units
//! delta = 21.0             # sets delta_q and delta_m together
//! g_qm = 21.0
//!
//! [thermal]                # alternative to params.n_th
//! magnon_frequency_ghz = 8.5
//! temperature_k = 0.045
//!
//! [trajectory]
//! n_trajectories = 500
//!
//! [axes.delta]             # replaces the delta axis of a preset or sweep
//! min = -30.0
//! max = 30.0
//! count = 241
//!
//! [sweep]
//! label = "my_scan"
//! solver = "deterministic"
//! axes = [{ param = "g_qm", min = 0.0, max = 30.0, count = 61 }]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use magnon_core::model::thermal_occupation;
use magnon_core::sweep::{Axis, AxisParam, CutoffPolicy, SolverChoice, SweepSpec, DEFAULT_G2_TOLERANCE};
use magnon_core::{SystemParams, TrajectoryConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cutoff: Option<CutoffSetting>,
    pub g2_tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub params: ParamsSection,
    pub thermal: Option<ThermalSection>,
    #[serde(default)]
    pub trajectory: TrajectorySection,
    #[serde(default)]
    pub axes: BTreeMap<AxisParam, AxisSection>,
    pub sweep: Option<SweepSection>,
}

/// `cutoff = "auto"` or `cutoff = 12`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CutoffSetting {
    Fixed(usize),
    Named(AutoCutoff),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoCutoff {
    Auto,
}

impl std::str::FromStr for CutoffSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(CutoffSetting::Named(AutoCutoff::Auto));
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(CutoffSetting::Fixed(n)),
            _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub delta: Option<f64>,
    pub delta_q: Option<f64>,
    pub delta_m: Option<f64>,
    pub g_qm: Option<f64>,
    pub omega_drive: Option<f64>,
    pub xi_probe: Option<f64>,
    pub kappa_m: Option<f64>,
    pub kappa_q: Option<f64>,
    pub n_th: Option<f64>,
    pub n_max: Option<usize>,
}

impl ParamsSection {
    /// Fields set in `other` replace fields set here.
    pub fn overlay(&self, other: &ParamsSection) -> ParamsSection {
        ParamsSection {
            delta: other.delta.or(self.delta),
            delta_q: other.delta_q.or(self.delta_q),
            delta_m: other.delta_m.or(self.delta_m),
            g_qm: other.g_qm.or(self.g_qm),
            omega_drive: other.omega_drive.or(self.omega_drive),
            xi_probe: other.xi_probe.or(self.xi_probe),
            kappa_m: other.kappa_m.or(self.kappa_m),
            kappa_q: other.kappa_q.or(self.kappa_q),
            n_th: other.n_th.or(self.n_th),
            n_max: other.n_max.or(self.n_max),
        }
    }

    pub fn apply(&self, mut p: SystemParams) -> SystemParams {
        if let Some(d) = self.delta {
            p = p.with_delta(d);
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        set!(
            delta_q,
            delta_m,
            g_qm,
            omega_drive,
            xi_probe,
            kappa_m,
            kappa_q,
            n_th,
            n_max
        );
        p
    }

    pub fn sets_drive(&self) -> bool {
        self.omega_drive.is_some_and(|v| v != 0.0) || self.xi_probe.is_some_and(|v| v != 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSection {
    pub magnon_frequency_ghz: f64,
    pub temperature_k: f64,
}

impl ThermalSection {
    pub fn n_th(&self) -> Result<f64, CliError> {
        Ok(thermal_occupation(self.magnon_frequency_ghz * 1e9, self.temperature_k)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub n_trajectories: Option<usize>,
    pub t_burn_in: Option<f64>,
    pub t_sample: Option<f64>,
    pub sample_interval: Option<f64>,
    pub dt_max: Option<f64>,
}

impl TrajectorySection {
    pub fn apply(&self, mut cfg: TrajectoryConfig) -> TrajectoryConfig {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(n_trajectories, t_burn_in, t_sample, sample_interval, dt_max);
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: magnon_core::sweep::Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    #[default]
    Deterministic,
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub label: String,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub solver: SolverName,
}

/// Settings given on the command line, layered over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub params: ParamsSection,
    pub cutoff: Option<CutoffSetting>,
    pub seed: Option<u64>,
    pub n_trajectories: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Model parameters resolved over `defaults`.
    pub fn params(&self, defaults: SystemParams, ov: &Overrides) -> Result<SystemParams, CliError> {
        let mut p = self.params.overlay(&ov.params).apply(defaults);
        if ov.params.n_th.is_none() && self.params.n_th.is_none() {
            if let Some(t) = &self.thermal {
                p.n_th = t.n_th()?;
            }
        } else if self.thermal.is_some() && self.params.n_th.is_some() {
            return Err(CliError::Config("set either params.n_th or [thermal], not both".into()));
        }
        p.validate()?;
        Ok(p)
    }

    pub fn cutoff_policy(&self, ov: &Overrides) -> Result<CutoffPolicy, CliError> {
        let tol = self.g2_tolerance.unwrap_or(DEFAULT_G2_TOLERANCE);
        if !(tol > 0.0) {
            return Err(CliError::Config(format!("g2_tolerance must be positive, got {tol}")));
        }
        Ok(match ov.cutoff.or(self.cutoff) {
            None | Some(CutoffSetting::Named(AutoCutoff::Auto)) => CutoffPolicy::Auto(tol),
            Some(CutoffSetting::Fixed(0)) => return Err(CliError::Config("cutoff must be at least 1".into())),
            Some(CutoffSetting::Fixed(n)) => CutoffPolicy::Fixed(n),
        })
    }

    pub fn trajectory(&self, p: &SystemParams, ov: &Overrides) -> Result<TrajectoryConfig, CliError> {
        let mut cfg = self.trajectory.apply(TrajectoryConfig::for_params(p));
        if let Some(n) = ov.n_trajectories {
            cfg.n_trajectories = n;
        }
        cfg.rng_seed = ov.seed.or(self.seed).unwrap_or(0);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces preset axes that the file overrides and applies the cutoff
    /// policy.
    pub fn adjust_spec(&self, mut spec: SweepSpec, ov: &Overrides) -> Result<SweepSpec, CliError> {
        for axis in &mut spec.axes {
            if let Some(a) = self.axes.get(&axis.param) {
                *axis = Axis {
                    param: axis.param,
                    min: a.min,
                    max: a.max,
                    count: a.count,
                    spacing: a.spacing,
                };
                spec.notes
                    .retain(|n| !n.starts_with(&format!("axis {} ", axis.param.column())));
                spec.notes.push(format!(
                    "axis {} range [{}, {}] x {} ({:?}) set by configuration",
                    axis.param.column(),
                    a.min,
                    a.max,
                    a.count,
                    a.spacing
                ));
            }
        }
        spec.cutoff = self.cutoff_policy(ov)?;
        if let SolverChoice::Trajectory(_) = spec.solver {
            spec.solver = SolverChoice::Trajectory(self.trajectory(&spec.base, ov)?);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// The custom sweep of the `[sweep]` section.
    pub fn sweep_spec(&self, ov: &Overrides) -> Result<SweepSpec, CliError> {
        let Some(s) = &self.sweep else {
            return Err(CliError::Config("the configuration has no [sweep] section".into()));
        };
        let base = self.params(SystemParams::blockade_defaults(), ov)?;
        let solver = match s.solver {
            SolverName::Deterministic => SolverChoice::Deterministic,
            SolverName::Trajectory => SolverChoice::Trajectory(self.trajectory(&base, ov)?),
        };
        let spec = SweepSpec {
            label: s.label.clone(),
            base,
            axes: s.axes.clone(),
            solver,
            cutoff: self.cutoff_policy(ov)?,
            notes: Vec::new(),
        };
        self.adjust_spec(spec, ov)
    }
}
