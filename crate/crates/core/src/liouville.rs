//! Liouvillian superoperator, steady-state solver, and deterministic time
//! evolution of the master equation.
//!
//! Density matrices are vectorized by column stacking, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. nalgebra stores matrices column-major,
//! which makes `vec(ρ)` the raw storage slice of `ρ`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{Operator, Qubit, Space, SpaceDims, StateVector, C64, ONE, ZERO};
use crate::model::{build_collapse_ops, build_hamiltonian, CollapseOp, SystemParams};
use crate::observables::{magnon_stats, MagnonStats};
use crate::ode::{self, Tolerances};
use crate::sparse::CompressedRows;

/// Tolerance used when validating density matrices.
pub const STATE_TOLERANCE: f64 = 1e-10;
/// Maximum entry of `L vec(ρ)` accepted for a steady state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Absolute (and relative) local error tolerance of [`evolve`].
pub const EVOLVE_TOLERANCE: f64 = 1e-10;

/// First cutoff tried by [`solve_converged`].
pub const CUTOFF_START: usize = 2;
/// Offset of the comparison cutoff in the convergence test.
pub const CUTOFF_STEP: usize = 4;
/// Largest cutoff ever solved during escalation.
pub const CUTOFF_CAP: usize = 40;
/// Largest admissible population of the top Fock level.
pub const TOP_POPULATION_LIMIT: f64 = 1e-8;

/// Density matrix on the joint qubit ⊗ magnon space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: SpaceDims,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity
    /// against [`STATE_TOLERANCE`].
    pub fn from_matrix(dims: SpaceDims, mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(dims, mat)?;
        rho.validate(STATE_TOLERANCE)?;
        Ok(rho)
    }

    /// Wraps a matrix, checking only its shape.
    pub fn from_matrix_unchecked(dims: SpaceDims, mat: DMatrix<C64>) -> Result<Self> {
        let d = dims.total();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: mat.nrows(),
            });
        }
        Ok(Self { dims, mat })
    }

    pub fn pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let n = psi.norm_sqr();
        Self {
            dims: psi.dims(),
            mat: (a * a.adjoint()) / C64::new(n, 0.0),
        }
    }

    /// `|g, 0><g, 0|`.
    pub fn vacuum(dims: SpaceDims) -> Self {
        Self::pure(&StateVector::basis(dims, Qubit::Ground, 0).expect("vacuum is in range"))
    }

    pub fn maximally_mixed(dims: SpaceDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            mat: DMatrix::identity(d, d) / C64::new(d as f64, 0.0),
        }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be non-negative.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidParameter("empty mixture".into()));
        };
        let dims = first.dims;
        let d = dims.total();
        let mut mat = DMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: rho.dims.total(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            mat += &rho.mat * C64::new(*w, 0.0);
        }
        Ok(Self { dims, mat })
    }

    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_matrix(Space::Joint(self.dims), self.mat.clone()).expect("density matrix shape matches its dims")
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint())
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.as_operator().hermitian_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("density matrix has non-finite entries".into()));
        }
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidParameter(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidParameter(format!("density matrix trace is {tr}, not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// `½ Σ |λ_i(ρ − σ)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                found: other.dims.total(),
            });
        }
        let diff = Operator::from_matrix(Space::Joint(self.dims), &self.mat - &other.mat)?;
        Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }

    fn vectorized(&self) -> Vec<C64> {
        self.mat.as_slice().to_vec()
    }

    fn from_vectorized(dims: SpaceDims, v: &[C64]) -> Self {
        let d = dims.total();
        Self {
            dims,
            mat: DMatrix::from_column_slice(d, d, v),
        }
    }

    fn hermitized(mut self) -> Self {
        self.mat = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        self
    }
}

/// Generator of the master equation acting on column-stacked `vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dims: SpaceDims,
    mat: DMatrix<C64>,
}

/// `target += coeff · (a ⊗ b)`.
fn add_kron(target: &mut DMatrix<C64>, coeff: C64, a: &DMatrix<C64>, b: &DMatrix<C64>) {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    for ja in 0..ca {
        for ia in 0..ra {
            let av = a[(ia, ja)];
            if av == ZERO {
                continue;
            }
            let s = coeff * av;
            for jb in 0..cb {
                for ib in 0..rb {
                    let bv = b[(ib, jb)];
                    if bv != ZERO {
                        target[(ia * rb + ib, ja * cb + jb)] += s * bv;
                    }
                }
            }
        }
    }
}

/// `L = −i(I⊗H − Hᵀ⊗I) + Σ_k [C̄_k⊗C_k − ½ I⊗C_k†C_k − ½ (C_k†C_k)ᵀ⊗I]` with
/// `C_k = √rate_k · op_k`.
pub fn build_liouvillian(h: &Operator, cs: &[CollapseOp]) -> Result<Liouvillian> {
    let Space::Joint(dims) = h.space() else {
        return Err(Error::InvalidDimension(
            "Hamiltonian must act on the joint space".into(),
        ));
    };
    let d = dims.total();
    let id: DMatrix<C64> = DMatrix::identity(d, d);
    let mut l = DMatrix::zeros(d * d, d * d);
    let hm = h.matrix();
    let i = C64::new(0.0, 1.0);
    add_kron(&mut l, -i, &id, hm);
    add_kron(&mut l, i, &hm.transpose(), &id);
    for c in cs {
        if c.operator.space() != h.space() {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.operator.dim(),
            });
        }
        if c.rate == 0.0 {
            continue;
        }
        let cm = c.scaled().into_matrix();
        let cdc = cm.adjoint() * &cm;
        add_kron(&mut l, ONE, &cm.map(|z| z.conj()), &cm);
        add_kron(&mut l, C64::new(-0.5, 0.0), &id, &cdc);
        add_kron(&mut l, C64::new(-0.5, 0.0), &cdc.transpose(), &id);
    }
    Ok(Liouvillian { dims, mat: l })
}

/// Builds the Liouvillian of the model directly from its parameters.
pub fn liouvillian_for(p: &SystemParams) -> Result<Liouvillian> {
    build_liouvillian(&build_hamiltonian(p)?, &build_collapse_ops(p)?)
}

impl Liouvillian {
    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// `L vec(ρ)` reshaped back to a matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DMatrix<C64>> {
        if rho.dims != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                found: rho.dims.total(),
            });
        }
        let d = self.dims.total();
        let v = DVector::from_column_slice(rho.mat.as_slice());
        let out = &self.mat * v;
        Ok(DMatrix::from_column_slice(d, d, out.as_slice()))
    }

    /// `max |L vec(ρ)|`.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.apply(rho)?.iter().fold(0.0, |m, z| m.max(z.norm())))
    }

    /// `max |vec(I)† L|`, zero for a trace-preserving generator.
    pub fn trace_leak(&self) -> f64 {
        let d = self.dims.total();
        let mut worst = 0.0_f64;
        for col in 0..d * d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += self.mat[(k * d + k, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// Full complex spectrum. Dense Schur decomposition, intended for small
    /// instances.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let schur = self.mat.clone().schur();
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    }
}

/// Steady state with the residual it was accepted at.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub residual: f64,
}

/// Solves `L vec(ρ) = 0` with `Tr ρ = 1`. The generator maps Hermitian
/// matrices to Hermitian matrices, so the solve runs on the D² real
/// coordinates of a Hermitian ρ (diagonal, real and imaginary upper
/// triangle). The equation for ρ₀₀, redundant for a trace-preserving
/// generator, is replaced by the trace functional. A singular or inaccurate
/// direct solve falls back to SVD null-space extraction.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    if let Some(v) = solve_hermitian(l) {
        if let Ok(s) = finish(l, &v) {
            return Ok(s);
        }
    }
    steady_state_svd(l)
}

/// Smallest relative LU pivot accepted as non-singular.
const PIVOT_FLOOR: f64 = 1e-12;

fn solve_hermitian(l: &Liouvillian) -> Option<Vec<C64>> {
    let d = l.dims.total();
    let n = d * d;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|k| (0..k).map(move |j| (j, k))).collect();
    let at = |j: usize, k: usize| k * d + j;
    let mut r = DMatrix::<f64>::zeros(n, n);
    let mut w = vec![ZERO; n];
    let column = |r: &mut DMatrix<f64>, c: usize, w: &[C64]| {
        for k in 0..d {
            r[(k, c)] = w[at(k, k)].re;
        }
        for (p, &(j, k)) in pairs.iter().enumerate() {
            r[(d + 2 * p, c)] = w[at(j, k)].re;
            r[(d + 2 * p + 1, c)] = w[at(j, k)].im;
        }
    };
    for k in 0..d {
        let src = l.mat.column(at(k, k));
        w.iter_mut().zip(src.iter()).for_each(|(o, &x)| *o = x);
        column(&mut r, k, &w);
    }
    let i = C64::new(0.0, 1.0);
    for (p, &(j, k)) in pairs.iter().enumerate() {
        let (a, b) = (l.mat.column(at(j, k)), l.mat.column(at(k, j)));
        for (o, (&x, &y)) in w.iter_mut().zip(a.iter().zip(b.iter())) {
            *o = x + y;
        }
        column(&mut r, d + 2 * p, &w);
        for (o, (&x, &y)) in w.iter_mut().zip(a.iter().zip(b.iter())) {
            *o = i * (x - y);
        }
        column(&mut r, d + 2 * p + 1, &w);
    }
    for c in 0..n {
        r[(0, c)] = if c < d { 1.0 } else { 0.0 };
    }
    let lu = r.lu();
    let u = lu.u();
    let pivots = u.diagonal().map(f64::abs);
    if !(pivots.min() > PIVOT_FLOOR * pivots.max()) {
        return None;
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    let x = lu.solve(&rhs)?;
    if !x.iter().all(|v| v.is_finite()) {
        return None;
    }
    let mut v = vec![ZERO; n];
    for k in 0..d {
        v[at(k, k)] = C64::new(x[k], 0.0);
    }
    for (p, &(j, k)) in pairs.iter().enumerate() {
        let z = C64::new(x[d + 2 * p], x[d + 2 * p + 1]);
        v[at(j, k)] = z;
        v[at(k, j)] = z.conj();
    }
    Some(v)
}

fn finish(l: &Liouvillian, v: &[C64]) -> Result<SteadyState> {
    let rho = DensityMatrix::from_vectorized(l.dims, v).hermitized();
    let tr = rho.trace();
    if tr.norm() == 0.0 || !tr.re.is_finite() {
        return Err(Error::Convergence {
            residual: f64::INFINITY,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    let rho = DensityMatrix {
        dims: rho.dims,
        mat: rho.mat / C64::new(tr.re, 0.0),
    };
    let residual = l.residual(&rho)?;
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::Convergence {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }
    Ok(SteadyState { rho, residual })
}

fn steady_state_svd(l: &Liouvillian) -> Result<SteadyState> {
    let svd = l.mat.clone().svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    let null_tol = 1e-9 * smax.max(1.0);
    let null_dim = sv.iter().filter(|&&s| s < null_tol).count();
    if null_dim > 1 {
        return Err(Error::NonUniqueSteadyState(null_dim));
    }
    let (k, _) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let v: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    finish(l, &v)
}

/// Integrates `dρ/dt = L ρ` from `rho0` over `[0, t_final]` with an adaptive
/// Dormand-Prince scheme whose step never exceeds `dt_max`.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t_final: f64, dt_max: f64) -> Result<DensityMatrix> {
    if rho0.dims != l.dims {
        return Err(Error::DimensionMismatch {
            expected: l.dims.total(),
            found: rho0.dims.total(),
        });
    }
    if !(t_final > 0.0) || !(dt_max > 0.0) {
        return Err(Error::Precondition(format!(
            "need positive t_final and dt_max, got {t_final} and {dt_max}"
        )));
    }
    let rows = CompressedRows::from_dense(&l.mat);
    let mut y = rho0.vectorized();
    ode::integrate(
        |x, dy| rows.apply(x, dy),
        &mut y,
        t_final,
        dt_max,
        Tolerances {
            atol: EVOLVE_TOLERANCE,
            rtol: EVOLVE_TOLERANCE,
        },
    )?;
    // L commutes with †, so only round-off breaks Hermiticity here
    Ok(DensityMatrix::from_vectorized(l.dims, &y).hermitized())
}

/// Steady state of the model at one cutoff, with its magnon statistics.
#[derive(Debug, Clone)]
pub struct CutoffSolution {
    pub n_max: usize,
    pub rho: DensityMatrix,
    pub residual: f64,
    pub stats: MagnonStats,
}

/// Solves the model at the cutoff stored in `p`.
pub fn solve_at_cutoff(p: &SystemParams) -> Result<CutoffSolution> {
    let l = liouvillian_for(p)?;
    let SteadyState { rho, residual } = steady_state(&l)?;
    let stats = magnon_stats(&rho)?;
    Ok(CutoffSolution {
        n_max: p.n_max,
        rho,
        residual,
        stats,
    })
}

/// Returns the solution at the smallest cutoff `n ≥ CUTOFF_START` whose top
/// Fock level holds less than [`TOP_POPULATION_LIMIT`] and whose g²(0)
/// differs from the value at `n + CUTOFF_STEP` by less than `g2_tol`
/// (relative). The comparison cutoff never exceeds [`CUTOFF_CAP`]. The
/// cutoff stored in `p` is ignored.
pub fn solve_converged(p: &SystemParams, g2_tol: f64) -> Result<CutoffSolution> {
    if !(g2_tol > 0.0) {
        return Err(Error::Precondition(format!(
            "g2 tolerance must be positive, got {g2_tol}"
        )));
    }
    p.validate()?;
    let mut solved: BTreeMap<usize, CutoffSolution> = BTreeMap::new();
    for n in CUTOFF_START..=CUTOFF_CAP - CUTOFF_STEP {
        let current = cached(&mut solved, p, n)?;
        if !(current.stats.top_level_population < TOP_POPULATION_LIMIT) {
            continue;
        }
        let a = current.stats.g2_zero;
        let b = cached(&mut solved, p, n + CUTOFF_STEP)?.stats.g2_zero;
        let rel = if b > 0.0 { (a - b).abs() / b } else { (a - b).abs() };
        if rel < g2_tol {
            return Ok(solved.remove(&n).expect("solved above"));
        }
    }
    Err(Error::Truncation {
        cap: CUTOFF_CAP,
        params: p.describe(),
    })
}

fn cached<'a>(
    solved: &'a mut BTreeMap<usize, CutoffSolution>,
    p: &SystemParams,
    n: usize,
) -> Result<&'a CutoffSolution> {
    match solved.entry(n) {
        std::collections::btree_map::Entry::Occupied(e) => Ok(e.into_mut()),
        std::collections::btree_map::Entry::Vacant(e) => Ok(e.insert(solve_at_cutoff(&p.with_cutoff(n))?)),
    }
}

/// Smallest converged cutoff, see [`solve_converged`].
pub fn converged_cutoff(p: &SystemParams, g2_tol: f64) -> Result<usize> {
    solve_converged(p, g2_tol).map(|s| s.n_max)
}
