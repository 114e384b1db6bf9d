//! Finite-volume and kinetic diagnostics for multi-dimensional scalar
//! conservation laws `u_t + div A(u) = 0`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exponents;
pub mod fit;
pub mod flux;
pub mod grid;
pub mod harness;
pub mod io;
pub mod kinetic;
pub mod nondeg;
pub mod poly;
pub mod quad;
pub mod scheme;
pub mod solver;
pub mod waves;

pub use error::{Error, Result};
pub use exponents::{bound_envelope, compute_exponents, compute_theta, gamma0, optimize_gamma, ExponentSet};
pub use flux::{eval_velocity, FluxKind, FluxModel, Interval};
pub use grid::{Axis, Boundary, Grid, SolutionField};
pub use harness::{contraction_audit, fit_rate, run_decay_experiment, DecayReport, ExperimentConfig};
pub use kinetic::{
    degiorgi_sequence, entropy_dissipation_residual, kinetic_function, level_set_integral, reconstruct_u,
    variation_bound_ratio, DissipationReport, KineticLevelData, SmoothBump, VGrid,
};
pub use nondeg::{nondegeneracy_profile, NondegeneracyProfile};
pub use poly::Polynomial;
pub use scheme::{numerical_flux, Scheme};
pub use solver::{solve, solve_from, step, step_by, Bump, InitialData, SolveConfig, Trajectory};
pub use waves::{oleinik_ratio, RarefactionWave, Reference};
