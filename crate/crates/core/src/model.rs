//! Physical model of the driven qubit-magnon system in the frame rotating at
//! the drive frequency.
//!
//! Every rate and detuning is expressed in units of γ = 2π × 1 MHz and time
//! in units of 1/γ. Absolute units only appear in [`thermal_occupation`] and
//! the drive-power helpers.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, qubit_ops, Factor, Operator, Qubit, Space, SpaceDims, C64};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;
/// Drive parameter K relating qubit drive strength to drive power, MHz/mW^½.
pub const DRIVE_PARAMETER: f64 = 103.0;
/// The frequency unit γ = 2π × 1 MHz, in angular MHz.
pub const GAMMA_ANGULAR_MHZ: f64 = 2.0 * PI;

/// Default Fock cutoff.
pub const DEFAULT_CUTOFF: usize = 10;

/// Rates and detunings of the rotating-frame model, in units of γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Qubit detuning ω_q − ω_d.
    pub delta_q: f64,
    /// Magnon detuning ω_m − ω_d.
    pub delta_m: f64,
    /// Effective qubit-magnon coupling.
    pub g_qm: f64,
    /// Qubit drive strength Ω.
    pub omega_drive: f64,
    /// Magnon probe strength ξ_p.
    pub xi_probe: f64,
    pub kappa_m: f64,
    pub kappa_q: f64,
    /// Thermal magnon occupation of the bath.
    pub n_th: f64,
    /// Fock cutoff n_max.
    pub n_max: usize,
}

impl SystemParams {
    /// Qubit and magnon sharing one detuning Δ = Δ_q = Δ_m.
    pub fn resonant(delta: f64, g_qm: f64, omega_drive: f64, xi_probe: f64) -> Self {
        Self {
            delta_q: delta,
            delta_m: delta,
            g_qm,
            omega_drive,
            xi_probe,
            ..Self::blockade_defaults()
        }
    }

    /// Δ = g_qm = 21, Ω = 0.1, ξ_p = 0.001, κ_m = 1.4, κ_q = 1.2, n_th = 0.
    pub fn blockade_defaults() -> Self {
        Self {
            delta_q: 21.0,
            delta_m: 21.0,
            g_qm: 21.0,
            omega_drive: 0.1,
            xi_probe: 0.001,
            kappa_m: 1.4,
            kappa_q: 1.2,
            n_th: 0.0,
            n_max: DEFAULT_CUTOFF,
        }
    }

    pub fn with_cutoff(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    /// Sets Δ_q = Δ_m = `delta`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta_q = delta;
        self.delta_m = delta;
        self
    }

    pub fn without_drives(mut self) -> Self {
        self.omega_drive = 0.0;
        self.xi_probe = 0.0;
        self
    }

    pub fn dims(&self) -> Result<SpaceDims> {
        SpaceDims::new(self.n_max)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_q", self.delta_q),
            ("delta_m", self.delta_m),
            ("g_qm", self.g_qm),
            ("omega_drive", self.omega_drive),
            ("xi_probe", self.xi_probe),
            ("kappa_m", self.kappa_m),
            ("kappa_q", self.kappa_q),
            ("n_th", self.n_th),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if self.kappa_m <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa_m must be positive, got {}",
                self.kappa_m
            )));
        }
        for (name, v) in [
            ("g_qm", self.g_qm),
            ("omega_drive", self.omega_drive),
            ("xi_probe", self.xi_probe),
            ("n_th", self.n_th),
            ("kappa_q", self.kappa_q),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.n_max < 1 {
            return Err(Error::InvalidDimension(format!(
                "n_max must be at least 1, got {}",
                self.n_max
            )));
        }
        Ok(())
    }

    pub(crate) fn describe(&self) -> String {
        format!(
            "delta_q={}, delta_m={}, g_qm={}, omega={}, xi={}, kappa_m={}, kappa_q={}, n_th={}",
            self.delta_q,
            self.delta_m,
            self.g_qm,
            self.omega_drive,
            self.xi_probe,
            self.kappa_m,
            self.kappa_q,
            self.n_th
        )
    }
}

/// Dissipation channel of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    MagnonDecay,
    MagnonHeating,
    QubitDecay,
}

impl Channel {
    pub fn name(&self) -> &'static str {
        match self {
            Channel::MagnonDecay => "magnon_decay",
            Channel::MagnonHeating => "magnon_heating",
            Channel::QubitDecay => "qubit_decay",
        }
    }
}

/// Jump operator `C` with rate `r`; the dissipator is `r (CρC† − ½{C†C, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOp {
    pub channel: Channel,
    pub operator: Operator,
    pub rate: f64,
}

impl CollapseOp {
    pub fn new(channel: Channel, operator: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be finite and non-negative, got {rate}"
            )));
        }
        Ok(Self {
            channel,
            operator,
            rate,
        })
    }

    /// `√rate · C`.
    pub fn scaled(&self) -> Operator {
        self.operator.scale_real(self.rate.sqrt())
    }
}

/// Operators shared by the Hamiltonian, the dissipators and the observables.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub dims: SpaceDims,
    pub m: Operator,
    pub sigma_minus: Operator,
    pub sigma_z: Operator,
}

impl ModelOperators {
    pub fn new(dims: SpaceDims) -> Result<Self> {
        let q = qubit_ops();
        Ok(Self {
            dims,
            m: embed(&annihilation(dims.magnon_cutoff())?, Factor::Magnon, dims)?,
            sigma_minus: embed(&q.lower, Factor::Qubit, dims)?,
            sigma_z: embed(&q.z, Factor::Qubit, dims)?,
        })
    }

    pub fn magnon_number(&self) -> Operator {
        diagonal_in_fock(self.dims, |n| n as f64)
    }

    /// `m†m†mm`, diagonal with entries n(n−1).
    pub fn pair_number(&self) -> Operator {
        diagonal_in_fock(self.dims, |n| (n * n.saturating_sub(1)) as f64)
    }

    /// Total excitation number `σ₊σ₋ + m†m`.
    pub fn excitation_number(&self) -> Operator {
        let dims = self.dims;
        let diag: Vec<f64> = (0..dims.total())
            .map(|i| {
                let (q, n) = dims.labels(i);
                (n + q as usize) as f64
            })
            .collect();
        Operator::diagonal(Space::Joint(dims), &diag).expect("diagonal matches dims")
    }
}

fn diagonal_in_fock(dims: SpaceDims, f: impl Fn(usize) -> f64) -> Operator {
    let diag: Vec<f64> = dims.magnon_numbers().map(f).collect();
    Operator::diagonal(Space::Joint(dims), &diag).expect("diagonal matches dims")
}

/// H = ½Δ_q σ_z + Δ_m m†m + g_qm(σ₊m + σ₋m†) + Ω(σ₊ + σ₋) + ξ_p(m† + m).
pub fn build_hamiltonian(p: &SystemParams) -> Result<Operator> {
    p.validate()?;
    let ops = ModelOperators::new(p.dims()?)?;
    let m = ops.m.matrix();
    let sm = ops.sigma_minus.matrix();
    let sp = sm.adjoint();
    let md = m.adjoint();
    let re = |x: f64| C64::new(x, 0.0);

    let mut h: DMatrix<C64> = ops.sigma_z.matrix() * re(0.5 * p.delta_q);
    h += ops.magnon_number().matrix() * re(p.delta_m);
    h += (&sp * m + sm * &md) * re(p.g_qm);
    h += (&sp + sm) * re(p.omega_drive);
    h += (&md + m) * re(p.xi_probe);
    // Clean round-off so the result is Hermitian to the last bit.
    let h = (&h + h.adjoint()) * re(0.5);
    Operator::from_matrix(Space::Joint(ops.dims), h)
}

/// Magnon decay √(κ_m(n_th+1)) m, magnon heating √(κ_m n_th) m†, and qubit
/// decay √κ_q σ₋, in that order. Zero-rate channels are kept.
pub fn build_collapse_ops(p: &SystemParams) -> Result<Vec<CollapseOp>> {
    p.validate()?;
    let ops = ModelOperators::new(p.dims()?)?;
    Ok(vec![
        CollapseOp::new(Channel::MagnonDecay, ops.m.clone(), p.kappa_m * (p.n_th + 1.0))?,
        CollapseOp::new(Channel::MagnonHeating, ops.m.dagger(), p.kappa_m * p.n_th)?,
        CollapseOp::new(Channel::QubitDecay, ops.sigma_minus, p.kappa_q)?,
    ])
}

/// Bose-Einstein occupation of a mode at `omega_m_hz` (ordinary frequency,
/// Hz) in a bath at `temperature_k`.
pub fn thermal_occupation(omega_m_hz: f64, temperature_k: f64) -> Result<f64> {
    if !(omega_m_hz > 0.0) || !(temperature_k > 0.0) {
        return Err(Error::Domain(format!(
            "frequency and temperature must be positive, got {omega_m_hz} Hz and {temperature_k} K"
        )));
    }
    let x = HBAR * 2.0 * PI * omega_m_hz / (K_B * temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// Dispersive coupling g_q g_m / Δ through a detuned cavity mode.
pub fn effective_coupling(g_q: f64, g_m: f64, photon_detuning: f64) -> Result<f64> {
    if photon_detuning == 0.0 {
        return Err(Error::Domain(
            "effective coupling is undefined at zero photon detuning".into(),
        ));
    }
    Ok(g_q * g_m / photon_detuning)
}

/// Ω = K √P_d in angular MHz (Mrad/s), with `power_mw` in mW and `k_param`
/// in MHz/mW^½. Divide by [`GAMMA_ANGULAR_MHZ`] for Ω/γ.
pub fn drive_strength_from_power(power_mw: f64, k_param: f64) -> Result<f64> {
    if !(power_mw >= 0.0) {
        return Err(Error::Domain(format!(
            "drive power must be non-negative, got {power_mw}"
        )));
    }
    Ok(k_param * power_mw.sqrt())
}

/// Inverse of [`drive_strength_from_power`].
pub fn power_from_drive_strength(omega_angular_mhz: f64, k_param: f64) -> Result<f64> {
    if !(omega_angular_mhz >= 0.0) || !(k_param > 0.0) {
        return Err(Error::Domain(format!(
            "need non-negative strength and positive K, got {omega_angular_mhz} and {k_param}"
        )));
    }
    Ok((omega_angular_mhz / k_param).powi(2))
}

/// Levels of one conserved-excitation block.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationBlock {
    pub excitations: usize,
    /// Ascending eigenvalues, units of γ.
    pub levels: Vec<f64>,
}

impl ExcitationBlock {
    pub fn splitting(&self) -> f64 {
        match (self.levels.first(), self.levels.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// Undriven spectrum grouped by total excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedSpectrum {
    pub blocks: Vec<ExcitationBlock>,
}

impl DressedSpectrum {
    /// All levels sorted ascending, each tagged with its excitation number.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut all: Vec<(f64, usize)> = self
            .blocks
            .iter()
            .flat_map(|b| b.levels.iter().map(move |&e| (e, b.excitations)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all
    }

    /// Splitting of the n-excitation doublet.
    pub fn splitting(&self, excitations: usize) -> Option<f64> {
        self.blocks
            .iter()
            .find(|b| b.excitations == excitations)
            .map(ExcitationBlock::splitting)
    }
}

/// Diagonalizes the undriven Hamiltonian block by block. Only blocks fully
/// contained in the truncated space (excitation number ≤ n_max) are kept.
pub fn dressed_spectrum(p: &SystemParams) -> Result<DressedSpectrum> {
    if p.omega_drive != 0.0 || p.xi_probe != 0.0 {
        return Err(Error::Precondition(
            "dressed spectrum requires omega_drive = xi_probe = 0".into(),
        ));
    }
    let h = build_hamiltonian(p)?;
    let dims = h.space();
    let Space::Joint(dims) = dims else {
        unreachable!("Hamiltonian lives on the joint space")
    };
    let mut blocks = Vec::with_capacity(dims.magnon_cutoff() + 1);
    for k in 0..=dims.magnon_cutoff() {
        let mut idx = vec![dims.index(Qubit::Ground, k)];
        if k >= 1 {
            idx.push(dims.index(Qubit::Excited, k - 1));
        }
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h.get(idx[i], idx[j]));
        let mut levels: Vec<f64> = sub.symmetric_eigenvalues().iter().copied().collect();
        levels.sort_by(f64::total_cmp);
        blocks.push(ExcitationBlock { excitations: k, levels });
    }
    Ok(DressedSpectrum { blocks })
}
