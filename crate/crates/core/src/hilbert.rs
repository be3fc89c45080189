//! Truncated Fock space of the magnon, the qubit two-level space, and the
//! dense operator algebra on their tensor product.
//!
//! Basis convention (used everywhere downstream, including vectorization):
//! the qubit factor comes first and the magnon factor second, so the joint
//! basis state `|q, n>` sits at index `q * (n_max + 1) + n` with the qubit
//! ground state `g = 0` and excited state `e = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouville::DensityMatrix;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Qubit basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Ground = 0,
    Excited = 1,
}

/// Dimensions of the joint qubit ⊗ magnon space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceDims {
    magnon_cutoff: usize,
}

impl SpaceDims {
    pub const QUBIT_DIM: usize = 2;

    pub fn new(magnon_cutoff: usize) -> Result<Self> {
        if magnon_cutoff < 1 {
            return Err(Error::InvalidDimension(format!(
                "magnon cutoff must be at least 1, got {magnon_cutoff}"
            )));
        }
        Ok(Self { magnon_cutoff })
    }

    /// Highest retained Fock level `n_max`.
    pub fn magnon_cutoff(&self) -> usize {
        self.magnon_cutoff
    }

    pub fn magnon_dim(&self) -> usize {
        self.magnon_cutoff + 1
    }

    pub fn total(&self) -> usize {
        Self::QUBIT_DIM * self.magnon_dim()
    }

    /// Joint basis index of `|q, n>`.
    pub fn index(&self, q: Qubit, n: usize) -> usize {
        debug_assert!(n <= self.magnon_cutoff);
        q as usize * self.magnon_dim() + n
    }

    /// Inverse of [`SpaceDims::index`].
    pub fn labels(&self, index: usize) -> (Qubit, usize) {
        let q = if index / self.magnon_dim() == 0 {
            Qubit::Ground
        } else {
            Qubit::Excited
        };
        (q, index % self.magnon_dim())
    }

    /// Magnon number of every joint basis state, in index order.
    pub(crate) fn magnon_numbers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.total()).map(move |i| i % self.magnon_dim())
    }
}

/// Which space an [`Operator`] acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Qubit,
    Magnon { n_max: usize },
    Joint(SpaceDims),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Qubit => SpaceDims::QUBIT_DIM,
            Space::Magnon { n_max } => n_max + 1,
            Space::Joint(d) => d.total(),
        }
    }
}

/// Tensor factor selector for [`embed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Qubit,
    Magnon,
}

/// Dense complex square matrix tagged with the space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: Space, mat: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDimension(format!(
                "operator matrix is {}x{}, not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: mat.nrows(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("operator has non-finite entries".into()));
        }
        Ok(Self { space, mat })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            mat: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            mat: DMatrix::identity(d, d),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(space: Space, diag: &[f64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: diag.len(),
            });
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::from_matrix(space, DMatrix::from_diagonal(&v))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space,
            mat: self.mat.adjoint(),
        }
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space,
            mat: &self.mat * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Largest entrywise deviation `max |A - A†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..=j {
                let d = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Dense action on a state vector.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if Space::Joint(psi.dims) != self.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dims.total(),
            });
        }
        Ok(StateVector {
            dims: psi.dims,
            amps: &self.mat * &psi.amps,
        })
    }
}

/// Magnon annihilation operator on the truncated Fock space `|0>..|n_max>`.
pub fn annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidDimension(format!(
            "Fock cutoff must be at least 1, got {n_max}"
        )));
    }
    let d = n_max + 1;
    let mut mat = DMatrix::zeros(d, d);
    for n in 1..d {
        mat[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator {
        space: Space::Magnon { n_max },
        mat,
    })
}

/// Qubit lowering, raising and Pauli-z operators on the two-level factor.
#[derive(Debug, Clone)]
pub struct QubitOps {
    pub lower: Operator,
    pub raise: Operator,
    pub z: Operator,
}

pub fn qubit_ops() -> QubitOps {
    let g = Qubit::Ground as usize;
    let e = Qubit::Excited as usize;
    let mut lower = DMatrix::zeros(2, 2);
    lower[(g, e)] = ONE;
    let mut z = DMatrix::zeros(2, 2);
    z[(e, e)] = ONE;
    z[(g, g)] = -ONE;
    let lower = Operator {
        space: Space::Qubit,
        mat: lower,
    };
    QubitOps {
        raise: lower.dagger(),
        lower,
        z: Operator {
            space: Space::Qubit,
            mat: z,
        },
    }
}

/// Lift a single-factor operator to the joint space by tensoring with the
/// identity on the other factor.
pub fn embed(op: &Operator, which: Factor, dims: SpaceDims) -> Result<Operator> {
    let expected = match which {
        Factor::Qubit => Space::Qubit,
        Factor::Magnon => Space::Magnon {
            n_max: dims.magnon_cutoff(),
        },
    };
    if op.space != expected {
        return Err(Error::DimensionMismatch {
            expected: expected.dim(),
            found: op.dim(),
        });
    }
    let mat = match which {
        Factor::Qubit => op
            .mat
            .kronecker(&DMatrix::<C64>::identity(dims.magnon_dim(), dims.magnon_dim())),
        Factor::Magnon => DMatrix::<C64>::identity(2, 2).kronecker(&op.mat),
    };
    Ok(Operator {
        space: Space::Joint(dims),
        mat,
    })
}

/// `Tr(ρ A)`.
pub fn expectation(rho: &DensityMatrix, a: &Operator) -> Result<C64> {
    if Space::Joint(rho.dims()) != a.space {
        return Err(Error::DimensionMismatch {
            expected: rho.dims().total(),
            found: a.dim(),
        });
    }
    let r = rho.matrix();
    let m = a.matrix();
    let d = m.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += r[(i, j)] * m[(j, i)];
        }
    }
    Ok(acc)
}

/// Pure state on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: SpaceDims,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(dims: SpaceDims, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("state vector has non-finite entries".into()));
        }
        Ok(Self { dims, amps })
    }

    /// Basis state `|q, n>`.
    pub fn basis(dims: SpaceDims, q: Qubit, n: usize) -> Result<Self> {
        if n > dims.magnon_cutoff() {
            return Err(Error::InvalidDimension(format!(
                "Fock level {n} above cutoff {}",
                dims.magnon_cutoff()
            )));
        }
        let mut amps = DVector::zeros(dims.total());
        amps[dims.index(q, n)] = ONE;
        Ok(Self { dims, amps })
    }

    pub fn dims(&self) -> SpaceDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a null state".into()));
        }
        Ok(Self {
            dims: self.dims,
            amps: &self.amps / C64::new(n, 0.0),
        })
    }

    /// `<ψ|A|ψ>` for a normalized state.
    pub fn expectation(&self, a: &Operator) -> Result<C64> {
        let ap = a.apply(self)?;
        Ok(self.amps.dotc(&ap.amps))
    }
}
