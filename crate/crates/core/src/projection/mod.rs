//! Projection onto the input rate and amplitude set
//! `U = { u : |u_k| ≤ a, |u_k − u_{k−1}| ≤ r, k = 0…T−1 }`.
//!
//! `U` is the intersection of the pair sets `U_k` on `(u_{k−1}, u_k)`,
//! `k = 1…T−1`. Each pair set has a closed-form piecewise-affine projection
//! ([`project_pair`]); pair sets of equal parity share no coordinates, so the
//! even and odd groups are projected exactly and combined with Dykstra's
//! algorithm ([`dykstra_project`]).

mod dykstra;
mod pair;
mod set;

pub use dykstra::{
    dykstra_project, project_group, DykstraConfig, DykstraStats, DykstraWorkspace, Parity,
};
pub use pair::{
    classify_region, project_pair, rotate45, unrotate45, CornerSet, PairBounds, PairProjector,
    Region,
};
pub use set::{contains, pair_bounds, RateAmpSet};
