use thiserror::Error;

/// Errors raised by the operator algebra, the solvers, and the sweep engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady state is not unique (null space dimension {0})")]
    NonUniqueSteadyState(usize),

    #[error("steady-state residual {residual:e} exceeds tolerance {tolerance:e}")]
    Convergence { residual: f64, tolerance: f64 },

    #[error("integrator step size underflow at t = {t}")]
    Stiffness { t: f64 },

    #[error("steady state carries no magnon excitation (<m†m> = {0:e})")]
    NoExcitation(f64),

    #[error("negative fourth-order moment {0:e}: density matrix is not positive")]
    Positivity(f64),

    #[error("Fock cutoff not converged at the cap n_max = {cap} for {params}")]
    Truncation { cap: usize, params: String },

    #[error("trajectory integration failed: {0}")]
    Integrator(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("unknown figure preset '{0}'")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
