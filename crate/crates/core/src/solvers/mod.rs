//! First-order solvers for the condensed QP over the rate/amplitude set.

mod admm;
mod fgm;
mod lifted;
mod memory;
mod result;

pub use admm::{admm_setup, AdmmConfig, AdmmState, AdmmWorkspace};
pub use fgm::{fgm_setup, FgmConfig, FgmWorkspace};
pub use lifted::{build_lifted, LiftedConstraints};
pub use memory::{memory_footprint, MemoryFootprint};
pub use result::{shift_stages, SolveResult, TraceEntry};

pub(crate) fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
