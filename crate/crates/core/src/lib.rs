//! Magnon blockade in a driven, dissipative qubit-magnon system.
//!
//! The model couples a two-level qubit to a truncated bosonic magnon mode
//! through an excitation-exchange interaction, drives both, and damps them
//! through a Lindblad master equation. All rates and detunings are in units
//! of γ.
//!
//! ```
//! use magnon_core::{solve_converged, SystemParams, classify};
//!
//! let sol = solve_converged(&SystemParams::blockade_defaults(), 1e-3).unwrap();
//! assert!(sol.stats.g2_zero < 1e-2);
//! assert!(classify(sol.stats.g2_zero).unwrap().blockade);
//! ```

pub mod error;
pub mod hilbert;
pub mod liouville;
pub mod model;
pub mod observables;
mod ode;
mod sparse;
pub mod sweep;
pub mod trajectory;

pub use error::{Error, Result};
pub use hilbert::{Operator, Qubit, SpaceDims, StateVector, C64};
pub use liouville::{
    build_liouvillian, converged_cutoff, evolve, liouvillian_for, solve_at_cutoff, solve_converged, steady_state,
    CutoffSolution, DensityMatrix, Liouvillian, SteadyState,
};
pub use model::{
    build_collapse_ops, build_hamiltonian, dressed_spectrum, thermal_occupation, Channel, CollapseOp, DressedSpectrum,
    SystemParams,
};
pub use observables::{classify, g2_zero, magnon_marginal, magnon_stats, Classification, MagnonStats, Statistics};
pub use sweep::{figure_preset, run_sweep, CutoffPolicy, PointStatus, SolverChoice, SweepResult, SweepSpec};
pub use trajectory::{ensemble_g2, TrajectoryConfig, TrajectoryEstimate};
