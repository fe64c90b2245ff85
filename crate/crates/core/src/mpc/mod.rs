//! Condensed MPC formulation.
//!
//! Eliminating the states of `x_{k+1} = A x_k + B u_k` over a horizon of `T`
//! stages gives `x = G u + H x0` and the dense QP `½uᵀJu + q(x0)ᵀu` in the
//! stacked input `u = (u_0, …, u_{T-1})` of dimension `n_u·T`.

mod condense;
mod dare;
mod prediction;
mod problem;
mod spectral;
mod system;

pub use condense::{build_qp, condense, stage_cost, CondensedQp};
pub use dare::{riccati_residual, solve_dare, solve_dare_with, DareOptions};
pub use prediction::{build_prediction, PredictionMatrices};
pub use problem::{MpcProblem, ProblemFile};
pub use spectral::{
    fgm_step_size, spectral_bounds, spectral_bounds_with, verify_spectral_sandwich,
    PowerIterationOptions, SpectralBounds,
};
pub use system::{CostSpec, LinearSystem};

use nalgebra::DMatrix;

/// Induced ∞-norm (maximum absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-12 * scale))
}

pub(crate) fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}
