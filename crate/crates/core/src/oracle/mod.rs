//! Slow, independent reference computations for verification.
//!
//! None of these share code with the fast paths in [`crate::projection`] or
//! [`crate::solvers`].

mod active_set;
mod dp;
mod grid;
mod reference;

pub use active_set::{
    active_set_project, active_set_project_polyhedron, ActiveSetCertificate, ActiveSetMethod,
    Polyhedron, Side, ENUMERATION_ROWS, ROW_GUARD,
};
pub use dp::{dp_rate_project, DpProjection, STAGE_GUARD};
pub use grid::grid_project_2d;
pub use reference::{kkt_residual, reference_solve, ReferenceMethod, ReferenceSolution};
