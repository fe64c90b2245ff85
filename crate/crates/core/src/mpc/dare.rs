use nalgebra::DMatrix;

use super::{inf_norm, LinearSystem};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct DareOptions {
    /// Stop once `‖P_{k+1} − P_k‖∞ < step_tol · max(1, ‖P_{k+1}‖∞)`.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Required Riccati residual of the returned `P`, relative to `max(1, ‖P‖∞)`.
    pub residual_tol: f64,
}

impl Default for DareOptions {
    fn default() -> Self {
        Self {
            step_tol: 1e-12,
            max_iter: 100_000,
            residual_tol: 1e-9,
        }
    }
}

/// Terminal weight from the unconstrained infinite-horizon regulator.
pub fn solve_dare(sys: &LinearSystem, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    solve_dare_with(sys, q, r, &DareOptions::default())
}

/// Backward value iteration `P ← AᵀPA − AᵀPB (R + BᵀPB)⁻¹ BᵀPA + Q` from `P = Q`.
pub fn solve_dare_with(
    sys: &LinearSystem,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    opts: &DareOptions,
) -> Result<DMatrix<f64>> {
    if q.nrows() != sys.nx() || !q.is_square() {
        return Err(Error::dim("Q", sys.nx(), q.nrows()));
    }
    if r.nrows() != sys.nu() || !r.is_square() {
        return Err(Error::dim("R", sys.nu(), r.nrows()));
    }
    if r.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite("R"));
    }

    let mut p = q.clone();
    let mut last_step = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let next = riccati_map(sys, q, r, &p)?;
        last_step = inf_norm(&(&next - &p));
        let scale = inf_norm(&next).max(1.0);
        p = next;
        if last_step < opts.step_tol * scale {
            let residual = riccati_residual(sys, q, r, &p)?;
            if residual > opts.residual_tol * scale {
                return Err(Error::DareResidual(residual));
            }
            return Ok(p);
        }
    }
    Err(Error::DareNotConverged {
        iterations: opts.max_iter,
        last_step,
    })
}

/// `‖AᵀPA − AᵀPB(R+BᵀPB)⁻¹BᵀPA + Q − P‖∞`.
pub fn riccati_residual(
    sys: &LinearSystem,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<f64> {
    Ok(inf_norm(&(riccati_map(sys, q, r, p)? - p)))
}

fn riccati_map(
    sys: &LinearSystem,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (a, b) = (sys.a(), sys.b());
    let pa = p * a;
    let pb = p * b;
    let s = r + b.transpose() * &pb;
    let chol = s.cholesky().ok_or(Error::NotPositiveDefinite("R + BᵀPB"))?;
    let gain = chol.solve(&(pb.transpose() * a));
    let mut next = a.transpose() * &pa - a.transpose() * &pb * gain + q;
    let sym = (&next + next.transpose()) * 0.5;
    next.copy_from(&sym);
    Ok(next)
}
