use nalgebra::{DMatrix, DVector};

use crate::projection::RateAmpSet;

/// Polyhedral form `v_lo ≤ K u ≤ v_hi` of the rate/amplitude set.
///
/// Rows `0 … n−1` are the identity with bounds `±a`; rows `n … 2n−1` are the
/// first differences `u_k − u_{k−1}` with bounds `±r`, where the stage-0 rows
/// compare against `u_{−1}` through shifted bounds `[u_{−1} − r, u_{−1} + r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedConstraints {
    pub k: DMatrix<f64>,
    pub v_lo: DVector<f64>,
    pub v_hi: DVector<f64>,
    pub nu: usize,
    pub horizon: usize,
}

impl LiftedConstraints {
    pub fn n_v(&self) -> usize {
        self.k.nrows()
    }

    pub fn dim(&self) -> usize {
        self.k.ncols()
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        let ku = &self.k * DVector::from_column_slice(u);
        (0..self.n_v()).all(|i| ku[i] >= self.v_lo[i] - tol && ku[i] <= self.v_hi[i] + tol)
    }

    /// Resets the shifted stage-0 rate bounds for a new `u_{−1}`; `K` is unchanged.
    pub fn update_u_prev(&mut self, set: &RateAmpSet) {
        let n = self.dim();
        for c in 0..self.nu {
            self.v_lo[n + c] = set.u_prev()[c] - set.rate()[c];
            self.v_hi[n + c] = set.u_prev()[c] + set.rate()[c];
        }
    }
}

pub fn build_lifted(set: &RateAmpSet) -> LiftedConstraints {
    let (nu, t) = (set.n_u(), set.horizon());
    let n = nu * t;
    let mut k = DMatrix::zeros(2 * n, n);
    let mut v_lo = DVector::zeros(2 * n);
    let mut v_hi = DVector::zeros(2 * n);
    for stage in 0..t {
        for c in 0..nu {
            let i = stage * nu + c;
            let (a, r) = (set.amplitude()[c], set.rate()[c]);
            k[(i, i)] = 1.0;
            v_lo[i] = -a;
            v_hi[i] = a;

            k[(n + i, i)] = 1.0;
            if stage == 0 {
                v_lo[n + i] = set.u_prev()[c] - r;
                v_hi[n + i] = set.u_prev()[c] + r;
            } else {
                k[(n + i, i - nu)] = -1.0;
                v_lo[n + i] = -r;
                v_hi[n + i] = r;
            }
        }
    }
    LiftedConstraints {
        k,
        v_lo,
        v_hi,
        nu,
        horizon: t,
    }
}
