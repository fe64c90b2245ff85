use nalgebra::{DMatrix, DVector};

use super::{
    build_prediction, is_symmetric, solve_dare, spectral_bounds, verify_spectral_sandwich,
    CostSpec, LinearSystem, PredictionMatrices,
};
use crate::{Error, Result};

/// Dense QP `½uᵀJu + q(x0)ᵀu` with `q(x0) = linmap·x0`.
///
/// The state-only constant of the MPC cost is dropped: for the cost assembled
/// by [`condense`], `stage_cost(u) = 2·objective(u) + c(x0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CondensedQp {
    pub j: DMatrix<f64>,
    pub linmap: DMatrix<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub nu: usize,
    pub horizon: usize,
}

impl CondensedQp {
    /// Wraps a Hessian and linear-term map, computing and checking its spectral bounds.
    pub fn from_hessian(
        j: DMatrix<f64>,
        linmap: DMatrix<f64>,
        nu: usize,
        horizon: usize,
    ) -> Result<Self> {
        let n = nu * horizon;
        if j.nrows() != n || j.ncols() != n {
            return Err(Error::dim("J", n, j.nrows()));
        }
        if linmap.nrows() != n {
            return Err(Error::dim("linmap rows", n, linmap.nrows()));
        }
        if !is_symmetric(&j) {
            return Err(Error::invalid("J", "not symmetric"));
        }
        let bounds = spectral_bounds(&j)?;
        if !(bounds.lambda_min > 0.0) {
            return Err(Error::NotStronglyConvex(bounds.lambda_min));
        }
        if !verify_spectral_sandwich(&j, &bounds) {
            return Err(Error::NotStronglyConvex(bounds.lambda_min));
        }
        Ok(Self {
            j,
            linmap,
            lambda_min: bounds.lambda_min,
            lambda_max: bounds.lambda_max,
            nu,
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.nu * self.horizon
    }

    pub fn nx(&self) -> usize {
        self.linmap.ncols()
    }

    pub fn linear_term(&self, x0: &[f64]) -> DVector<f64> {
        assert_eq!(x0.len(), self.nx(), "state length");
        &self.linmap * DVector::from_column_slice(x0)
    }

    /// `½uᵀJu + qᵀu`, constant term excluded.
    pub fn objective(&self, u: &[f64], q: &DVector<f64>) -> f64 {
        let u = DVector::from_column_slice(u);
        0.5 * u.dot(&(&self.j * &u)) + q.dot(&u)
    }
}

/// `J = Gᵀ Q̄ G + I_T ⊗ R` and `linmap = Gᵀ Q̄ H`, where `Q̄` weights
/// `x_1 … x_{T-1}` with `Q` and `x_T` with `P`.
pub fn condense(pred: &PredictionMatrices, cost: &CostSpec) -> Result<CondensedQp> {
    let (nx, nu, t) = (pred.nx, pred.nu, pred.horizon);
    if cost.horizon != t {
        return Err(Error::dim("horizon", t, cost.horizon));
    }
    if cost.q.nrows() != nx {
        return Err(Error::dim("Q", nx, cost.q.nrows()));
    }
    if cost.r.nrows() != nu {
        return Err(Error::dim("R", nu, cost.r.nrows()));
    }
    let p = cost
        .p
        .as_ref()
        .ok_or_else(|| Error::invalid("P", "terminal weight missing; call solve_dare first"))?;

    let qbar_g = weighted_rows(&pred.g, &cost.q, p, nx, t);
    let qbar_h = weighted_rows(&pred.h, &cost.q, p, nx, t);
    let mut j = pred.g.transpose() * qbar_g;
    for k in 0..t {
        let mut block = j.view_mut((k * nu, k * nu), (nu, nu));
        block += &cost.r;
    }
    let sym = (&j + j.transpose()) * 0.5;
    let linmap = pred.g.transpose() * qbar_h;
    CondensedQp::from_hessian(sym, linmap, nu, t)
}

/// Condenses a system/cost pair, solving the DARE when `P` is absent.
pub fn build_qp(sys: &LinearSystem, cost: &CostSpec) -> Result<CondensedQp> {
    cost.check_against(sys)?;
    let mut cost = cost.clone();
    if cost.p.is_none() {
        cost.p = Some(solve_dare(sys, &cost.q, &cost.r)?);
    }
    let pred = build_prediction(sys, cost.horizon)?;
    condense(&pred, &cost)
}

/// `Q̄ M` for a matrix with `T` stacked blocks of `nx` rows.
fn weighted_rows(
    m: &DMatrix<f64>,
    q: &DMatrix<f64>,
    p: &DMatrix<f64>,
    nx: usize,
    t: usize,
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for k in 0..t {
        let w = if k + 1 == t { p } else { q };
        let block = w * m.rows(k * nx, nx);
        out.rows_mut(k * nx, nx).copy_from(&block);
    }
    out
}

/// The MPC cost `Σ_{k<T} x_kᵀQx_k + u_kᵀRu_k + x_TᵀPx_T` by forward simulation.
pub fn stage_cost(sys: &LinearSystem, cost: &CostSpec, x0: &[f64], u: &[f64]) -> Result<f64> {
    let (nx, nu, t) = (sys.nx(), sys.nu(), cost.horizon);
    if u.len() != nu * t {
        return Err(Error::dim("u", nu * t, u.len()));
    }
    if x0.len() != nx {
        return Err(Error::dim("x0", nx, x0.len()));
    }
    let p = cost
        .p
        .as_ref()
        .ok_or_else(|| Error::invalid("P", "terminal weight missing"))?;
    let quad = |m: &DMatrix<f64>, v: &[f64]| {
        let v = DVector::from_column_slice(v);
        v.dot(&(m * &v))
    };
    let mut x = x0.to_vec();
    let mut total = 0.0;
    for k in 0..t {
        let uk = &u[k * nu..(k + 1) * nu];
        total += quad(&cost.q, &x) + quad(&cost.r, uk);
        x = sys.step(&x, uk);
    }
    Ok(total + quad(p, &x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn scalar_case(a: f64) -> (LinearSystem, CostSpec) {
        let sys = LinearSystem::new(dmatrix![a], dmatrix![1.0], 1.0).unwrap();
        let cost = CostSpec::new(dmatrix![1.0], dmatrix![1.0], Some(dmatrix![1.0]), 2).unwrap();
        (sys, cost)
    }

    #[test]
    fn zero_dynamics() {
        let (sys, cost) = scalar_case(0.0);
        let qp = build_qp(&sys, &cost).unwrap();
        assert_eq!(qp.j, dmatrix![2.0, 0.0; 0.0, 2.0]);
        assert_eq!(qp.linmap, dmatrix![0.0; 0.0]);
    }

    #[test]
    fn integrator_against_dense_evaluation() {
        // Independent evaluation: x1 = x0 + u0, x2 = x0 + u0 + u1, cost
        // x1² + x2² + u0² + u1² has Hessian 2·[[3,1],[1,2]].
        let (sys, cost) = scalar_case(1.0);
        let qp = build_qp(&sys, &cost).unwrap();
        assert_eq!(qp.j, dmatrix![3.0, 1.0; 1.0, 2.0]);
        assert_eq!(qp.linmap, dmatrix![2.0; 1.0]);
    }

    #[test]
    fn missing_terminal_weight_is_an_error() {
        let (sys, mut cost) = scalar_case(1.0);
        cost.p = None;
        let pred = build_prediction(&sys, 2).unwrap();
        assert!(condense(&pred, &cost).is_err());
        assert!(build_qp(&sys, &cost).is_ok());
    }

    #[test]
    fn singular_hessian_detected() {
        let j = dmatrix![1.0, 1.0; 1.0, 1.0];
        let err = CondensedQp::from_hessian(j, dmatrix![0.0; 0.0], 1, 2).unwrap_err();
        assert!(matches!(err, Error::NotStronglyConvex(_)));
    }

    #[test]
    fn objective_differences_match_simulated_cost() {
        let a = dmatrix![1.0, 0.1; -0.2, 0.9];
        let b = dmatrix![0.0, 0.5; 1.0, 0.2];
        let sys = LinearSystem::new(a, b, 0.1).unwrap();
        let cost = CostSpec::new(
            dmatrix![2.0, 0.3; 0.3, 1.0],
            dmatrix![1.0, 0.0; 0.0, 0.5],
            None,
            5,
        )
        .unwrap();
        let qp = build_qp(&sys, &cost).unwrap();
        let mut cost_p = cost.clone();
        cost_p.p = Some(solve_dare(&sys, &cost.q, &cost.r).unwrap());

        let x0 = [0.7, -1.3];
        let q = qp.linear_term(&x0);
        let u1: Vec<f64> = (0..10).map(|i| (i as f64 * 0.9).cos()).collect();
        let u2: Vec<f64> = (0..10).map(|i| (i as f64 * 0.4).sin() - 0.2).collect();
        let d_condensed = qp.objective(&u1, &q) - qp.objective(&u2, &q);
        let d_sim = stage_cost(&sys, &cost_p, &x0, &u1).unwrap()
            - stage_cost(&sys, &cost_p, &x0, &u2).unwrap();
        assert!((2.0 * d_condensed - d_sim).abs() <= 1e-9 * d_sim.abs().max(1.0));
    }
}
