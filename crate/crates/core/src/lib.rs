//! Linear MPC with input rate and amplitude constraints.
//!
//! The condensed QP `min ½uᵀJu + qᵀu  s.t. u ∈ U` is solved either by the fast
//! gradient method, whose projection onto `U` is computed with Dykstra's
//! algorithm over closed-form 2-D pair projections, or by an ADMM baseline that
//! lifts the constraints into auxiliary box-constrained variables.
//!
//! Modules:
//! - [`mpc`]: prediction matrices, DARE terminal cost, condensing, spectral bounds.
//! - [`projection`]: the rate/amplitude set, the 2-D pair projection and Dykstra.
//! - [`solvers`]: FGM+Dykstra, lifted constraints and ADMM.
//! - [`oracle`]: slow independent references used for verification.

pub mod clock;
mod error;
pub mod mpc;
pub mod oracle;
pub mod projection;
pub mod solvers;

pub use error::{Error, Result};
pub use mpc::{
    build_prediction, condense, fgm_step_size, solve_dare, spectral_bounds, CondensedQp, CostSpec,
    LinearSystem, MpcProblem, PredictionMatrices, SpectralBounds,
};
pub use projection::{
    classify_region, contains, dykstra_project, pair_bounds, project_group, project_pair, rotate45,
    unrotate45, CornerSet, DykstraConfig, DykstraStats, DykstraWorkspace, PairBounds, Parity,
    RateAmpSet, Region,
};
pub use solvers::{
    admm_setup, build_lifted, fgm_setup, AdmmConfig, AdmmState, AdmmWorkspace, FgmConfig,
    FgmWorkspace, LiftedConstraints, SolveResult, TraceEntry,
};
