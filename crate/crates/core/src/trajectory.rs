//! Monte Carlo wave-function (quantum-jump) unraveling of the master
//! equation.
//!
//! Each trajectory evolves an unnormalized state under the non-Hermitian
//! generator `H − (i/2) Σ_k C_k†C_k`. A uniform threshold `r` is drawn; when
//! `‖ψ‖²` crosses `r` the crossing time is bisected, a channel is chosen with
//! probability proportional to `‖C_k ψ‖²`, the jump is applied, the state is
//! renormalized and a fresh threshold drawn.
//!
//! Trajectory `i` draws from ChaCha8 seeded with `rng_seed` on stream `i`, so
//! ensemble results do not depend on scheduling order or worker count.

use nalgebra::DMatrix;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Operator, Qubit, Space, SpaceDims, StateVector, C64, ZERO};
use crate::model::{build_collapse_ops, build_hamiltonian, Channel, CollapseOp, SystemParams};
use crate::observables::ratio;
use crate::ode::{min_step, next_step, Dopri5, Tolerances};
use crate::sparse::CompressedRows;

/// Identifies the random-number scheme recorded in sweep provenance.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9): seed_from_u64(rng_seed), stream = trajectory index";
/// Bootstrap resamples used for the ensemble standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Time resolution of jump localization.
pub const JUMP_TIME_TOLERANCE: f64 = 1e-10;

const BOOTSTRAP_STREAM: u64 = u64::MAX;
const STEP_TOLERANCE: Tolerances = Tolerances {
    atol: 1e-10,
    rtol: 1e-10,
};
const NORM_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    /// Relaxation time discarded before sampling, units of 1/γ.
    pub t_burn_in: f64,
    /// Length of the sampling window, units of 1/γ.
    pub t_sample: f64,
    pub sample_interval: f64,
    pub rng_seed: u64,
    pub dt_max: f64,
}

impl TrajectoryConfig {
    /// 500 trajectories, burn-in of 20 / min(κ_m, κ_q), 200/γ of sampling.
    pub fn for_params(p: &SystemParams) -> Self {
        let slowest = [p.kappa_m, p.kappa_q]
            .into_iter()
            .filter(|&k| k > 0.0)
            .fold(f64::INFINITY, f64::min);
        Self {
            n_trajectories: 500,
            t_burn_in: 20.0 / slowest,
            t_sample: 200.0,
            sample_interval: 0.5,
            rng_seed: 0,
            dt_max: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories < 1 {
            return Err(Error::InvalidParameter("n_trajectories must be at least 1".into()));
        }
        for (name, v) in [
            ("t_burn_in", self.t_burn_in),
            ("t_sample", self.t_sample),
            ("sample_interval", self.sample_interval),
            ("dt_max", self.dt_max),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sample_interval > self.t_sample {
            return Err(Error::InvalidParameter(format!(
                "sample_interval {} exceeds t_sample {}",
                self.sample_interval, self.t_sample
            )));
        }
        Ok(())
    }

    fn sample_count(&self) -> usize {
        (self.t_sample / self.sample_interval + 1e-9).floor() as usize + 1
    }

    fn sample_time(&self, k: usize) -> f64 {
        self.t_burn_in + k as f64 * self.sample_interval
    }

    fn in_window(&self, t: f64) -> bool {
        t >= self.t_burn_in && t <= self.t_burn_in + self.t_sample
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: Channel,
}

/// Output of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Time average of `<m†m>` over the sampling window.
    pub mean_number: f64,
    /// Time average of `<m†m†mm>` over the sampling window.
    pub mean_pair: f64,
    pub samples: usize,
    /// Every jump, including those during burn-in.
    pub jumps: Vec<JumpEvent>,
    /// Jumps inside the sampling window, per channel in unraveling order.
    pub window_counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEstimate {
    pub g2_mean: f64,
    /// Bootstrap standard error; infinite for a single trajectory.
    pub g2_stderr: f64,
    pub n_mean: f64,
    pub n_stderr: f64,
    pub channels: Vec<Channel>,
    /// Jumps inside the sampling windows, summed over trajectories.
    pub jump_counts: Vec<u64>,
    /// Total sampled time, `n_trajectories · t_sample`.
    pub sampled_time: f64,
    pub n_trajectories: usize,
}

impl TrajectoryEstimate {
    /// Observed jump rate of each channel.
    pub fn jump_rates(&self) -> Vec<f64> {
        self.jump_counts.iter().map(|&c| c as f64 / self.sampled_time).collect()
    }
}

/// Precomputed non-Hermitian generator and jump operators.
#[derive(Debug, Clone)]
pub struct Unraveling {
    dims: SpaceDims,
    generator: CompressedRows,
    jumps: Vec<(Channel, DMatrix<C64>)>,
    numbers: Vec<f64>,
}

impl Unraveling {
    /// Zero-rate channels are dropped.
    pub fn new(h: &Operator, cs: &[CollapseOp]) -> Result<Self> {
        let Space::Joint(dims) = h.space() else {
            return Err(Error::InvalidDimension(
                "Hamiltonian must act on the joint space".into(),
            ));
        };
        let mut gen = h.matrix() * C64::new(0.0, -1.0);
        let mut jumps = Vec::new();
        for c in cs {
            if c.operator.space() != h.space() {
                return Err(Error::DimensionMismatch {
                    expected: h.dim(),
                    found: c.operator.dim(),
                });
            }
            if c.rate == 0.0 {
                continue;
            }
            let cm = c.scaled().into_matrix();
            gen -= cm.adjoint() * &cm * C64::new(0.5, 0.0);
            jumps.push((c.channel, cm));
        }
        Ok(Self {
            dims,
            generator: CompressedRows::from_dense(&gen),
            jumps,
            numbers: dims.magnon_numbers().map(|n| n as f64).collect(),
        })
    }

    pub fn for_params(p: &SystemParams) -> Result<Self> {
        Self::new(&build_hamiltonian(p)?, &build_collapse_ops(p)?)
    }

    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn channels(&self) -> Vec<Channel> {
        self.jumps.iter().map(|(c, _)| *c).collect()
    }

    fn moments(&self, psi: &[C64]) -> (f64, f64) {
        let mut norm = 0.0;
        let mut number = 0.0;
        let mut pair = 0.0;
        for (z, &n) in psi.iter().zip(&self.numbers) {
            let w = z.norm_sqr();
            norm += w;
            number += n * w;
            pair += n * (n - 1.0).max(0.0) * w;
        }
        (number / norm, pair / norm)
    }

    fn jump(&self, psi: &[C64], rng: &mut ChaCha8Rng) -> Result<(Channel, Vec<C64>)> {
        let candidates: Vec<(Channel, Vec<C64>, f64)> = self
            .jumps
            .iter()
            .map(|(ch, c)| {
                let out: Vec<C64> = (0..psi.len())
                    .map(|i| (0..psi.len()).fold(ZERO, |acc, j| acc + c[(i, j)] * psi[j]))
                    .collect();
                let w = out.iter().map(|z| z.norm_sqr()).sum::<f64>();
                (*ch, out, w)
            })
            .collect();
        let total: f64 = candidates.iter().map(|c| c.2).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Integrator(
                "norm decayed but no channel has positive weight".into(),
            ));
        }
        let pick = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let last = candidates.len() - 1;
        for (k, (ch, out, w)) in candidates.into_iter().enumerate() {
            acc += w;
            if pick < acc || k == last {
                let s = w.sqrt();
                return Ok((ch, out.into_iter().map(|z| z / s).collect()));
            }
        }
        unreachable!("candidate list is non-empty")
    }

    /// Runs one trajectory from `psi0`.
    pub fn run(&self, psi0: &StateVector, cfg: &TrajectoryConfig, rng: &mut ChaCha8Rng) -> Result<TrajectoryRecord> {
        cfg.validate()?;
        if psi0.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                found: psi0.dims().total(),
            });
        }
        let mut psi: Vec<C64> = psi0.normalized()?.amplitudes().iter().copied().collect();
        let dim = psi.len();
        let gen = &self.generator;
        let mut stepper = Dopri5::new(dim, STEP_TOLERANCE, |x: &[C64], dy: &mut [C64]| gen.apply(x, dy));
        let mut out = vec![ZERO; dim];
        let mut probe = vec![ZERO; dim];
        let norm2 = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();

        let dissipative = !self.jumps.is_empty();
        let mut threshold: f64 = rng.sample(Open01);
        let mut jumps = Vec::new();
        let mut window_counts = vec![0u64; self.jumps.len()];
        let n_samples = cfg.sample_count();
        let (mut sum_n, mut sum_pair) = (0.0, 0.0);
        let mut next_sample = 0usize;
        let mut t = 0.0_f64;
        let mut h = cfg.dt_max.min(0.01);

        while next_sample < n_samples {
            let target = cfg.sample_time(next_sample);
            if t >= target {
                let (n, pair) = self.moments(&psi);
                sum_n += n;
                sum_pair += pair;
                next_sample += 1;
                continue;
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let err = stepper.try_step(&psi, step, &mut out);
            if !(err.is_finite() && err <= 1.0) {
                h = if err.is_finite() {
                    next_step(step, err)
                } else {
                    0.2 * step
                };
                if h < min_step(t) {
                    return Err(Error::Integrator(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            let n_out = norm2(&out);
            if !n_out.is_finite() || n_out < NORM_UNDERFLOW {
                return Err(Error::Integrator(format!(
                    "state norm underflow ({n_out:e}) at t = {t} without a resolved jump"
                )));
            }
            if dissipative && n_out <= threshold {
                // Bisect the crossing norm² = threshold inside (0, step].
                let (mut lo, mut hi) = (0.0, step);
                probe.copy_from_slice(&out);
                while hi - lo > JUMP_TIME_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    stepper.try_step(&psi, mid, &mut out);
                    if norm2(&out) <= threshold {
                        hi = mid;
                        probe.copy_from_slice(&out);
                    } else {
                        lo = mid;
                    }
                }
                t += hi;
                let (channel, after) = self.jump(&probe, rng)?;
                let k = self
                    .jumps
                    .iter()
                    .position(|(c, _)| *c == channel)
                    .expect("channel exists");
                if cfg.in_window(t) {
                    window_counts[k] += 1;
                }
                jumps.push(JumpEvent { time: t, channel });
                psi = after;
                threshold = rng.sample(Open01);
                continue;
            }
            std::mem::swap(&mut psi, &mut out);
            t = if last { target } else { t + step };
            h = next_step(step, err).min(cfg.dt_max);
        }

        Ok(TrajectoryRecord {
            mean_number: sum_n / n_samples as f64,
            mean_pair: sum_pair / n_samples as f64,
            samples: n_samples,
            jumps,
            window_counts,
        })
    }
}

/// Random stream of trajectory `index` under `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One trajectory of the model started from the vacuum `|g, 0>`.
pub fn run_trajectory(p: &SystemParams, cfg: &TrajectoryConfig, traj_index: u64) -> Result<TrajectoryRecord> {
    let unravel = Unraveling::for_params(p)?;
    run_indexed(&unravel, cfg, traj_index)
}

fn run_indexed(unravel: &Unraveling, cfg: &TrajectoryConfig, index: u64) -> Result<TrajectoryRecord> {
    let psi0 = StateVector::basis(unravel.dims(), Qubit::Ground, 0)?;
    let mut rng = trajectory_rng(cfg.rng_seed, index);
    unravel.run(&psi0, cfg, &mut rng)
}

#[cfg(feature = "parallel")]
fn run_all(unravel: &Unraveling, cfg: &TrajectoryConfig) -> Vec<Result<TrajectoryRecord>> {
    use rayon::prelude::*;
    (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|i| run_indexed(unravel, cfg, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(unravel: &Unraveling, cfg: &TrajectoryConfig) -> Vec<Result<TrajectoryRecord>> {
    (0..cfg.n_trajectories as u64)
        .map(|i| run_indexed(unravel, cfg, i))
        .collect()
}

/// Ensemble estimate of g²(0) = E[<m†m†mm>] / E[<m†m>]² with bootstrap
/// standard errors over trajectories.
pub fn ensemble_g2(p: &SystemParams, cfg: &TrajectoryConfig) -> Result<TrajectoryEstimate> {
    cfg.validate()?;
    let unravel = Unraveling::for_params(p)?;
    let records = run_all(&unravel, cfg).into_iter().collect::<Result<Vec<_>>>()?;
    estimate(&records, unravel.channels(), cfg)
}

pub(crate) fn estimate(
    records: &[TrajectoryRecord],
    channels: Vec<Channel>,
    cfg: &TrajectoryConfig,
) -> Result<TrajectoryEstimate> {
    let n = records.len();
    let numbers: Vec<f64> = records.iter().map(|r| r.mean_number).collect();
    let pairs: Vec<f64> = records.iter().map(|r| r.mean_pair).collect();
    let n_mean = numbers.iter().sum::<f64>() / n as f64;
    let pair_mean = pairs.iter().sum::<f64>() / n as f64;
    let g2_mean = ratio(pair_mean, n_mean)?;

    let mut jump_counts = vec![0u64; channels.len()];
    for r in records {
        for (total, c) in jump_counts.iter_mut().zip(&r.window_counts) {
            *total += c;
        }
    }

    let (g2_stderr, n_stderr) = if n < 2 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let mut rng = trajectory_rng(cfg.rng_seed, BOOTSTRAP_STREAM);
        let mut g2s = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        let mut ns = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let (mut sn, mut sp) = (0.0, 0.0);
            for _ in 0..n {
                let k = rng.random_range(0..n);
                sn += numbers[k];
                sp += pairs[k];
            }
            let (bn, bp) = (sn / n as f64, sp / n as f64);
            ns.push(bn);
            if let Ok(g) = ratio(bp, bn) {
                g2s.push(g);
            }
        }
        (std_dev(&g2s), std_dev(&ns))
    };

    Ok(TrajectoryEstimate {
        g2_mean,
        g2_stderr,
        n_mean,
        n_stderr,
        channels,
        jump_counts,
        sampled_time: n as f64 * cfg.t_sample,
        n_trajectories: n,
    })
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::INFINITY;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}
