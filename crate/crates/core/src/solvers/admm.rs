use std::time::Duration;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{l2_dist, shift_stages, LiftedConstraints, SolveResult, TraceEntry};
use crate::clock::Stopwatch;
use crate::mpc::CondensedQp;
use crate::projection::RateAmpSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmmConfig {
    /// Constant penalty parameter; the factorization depends on it.
    pub rho: f64,
    pub max_iter: usize,
    /// Stop once primal and dual residuals (∞-norm) both fall below this.
    pub tolerance: Option<f64>,
    pub record_trace: bool,
    pub trace_stride: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iter: 100,
            tolerance: None,
            record_trace: false,
            trace_stride: 1,
        }
    }
}

/// Primal, lifted and dual iterates; also the warm-start payload.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl AdmmState {
    pub fn zeros(n: usize, n_v: usize) -> Self {
        Self {
            u: vec![0.0; n],
            v: vec![0.0; n_v],
            gamma: vec![0.0; n_v],
        }
    }

    /// Shifts every block (u, amplitude rows, rate rows) by one stage.
    pub fn shifted(&self, nu: usize) -> Self {
        let n = self.u.len();
        let mut v = shift_stages(&self.v[..n], nu);
        v.extend(shift_stages(&self.v[n..], nu));
        let mut gamma = shift_stages(&self.gamma[..n], nu);
        gamma.extend(shift_stages(&self.gamma[n..], nu));
        Self {
            u: shift_stages(&self.u, nu),
            v,
            gamma,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdmmWorkspace {
    pub cfg: AdmmConfig,
    factor: Cholesky<f64, Dyn>,
    factor_count: usize,
    factor_time: Duration,
    k: DMatrix<f64>,
    v_lo: DVector<f64>,
    v_hi: DVector<f64>,
    linmap: DMatrix<f64>,
    nu: usize,
    q: DVector<f64>,
    u: DVector<f64>,
    ku: DVector<f64>,
    v: DVector<f64>,
    v_old: DVector<f64>,
    gamma: DVector<f64>,
    tmp_v: DVector<f64>,
    rhs: DVector<f64>,
}

/// Assembles `J + ρKᵀK` and factorizes it once.
pub fn admm_setup(
    qp: &CondensedQp,
    lifted: &LiftedConstraints,
    cfg: AdmmConfig,
) -> Result<AdmmWorkspace> {
    if !(cfg.rho > 0.0 && cfg.rho.is_finite()) {
        return Err(Error::invalid("rho", "must be positive and finite"));
    }
    if cfg.max_iter == 0 {
        return Err(Error::invalid("I_max", "must be >= 1"));
    }
    let n = qp.dim();
    if lifted.dim() != n {
        return Err(Error::dim("lifted constraint columns", n, lifted.dim()));
    }
    let n_v = lifted.n_v();
    let clock = Stopwatch::start();
    let mut system = qp.j.clone();
    system.gemm_tr(cfg.rho, &lifted.k, &lifted.k, 1.0);
    let factor = Cholesky::new(system).ok_or(Error::Factorization("J + rho K'K"))?;
    let factor_time = clock.elapsed();
    Ok(AdmmWorkspace {
        cfg,
        factor,
        factor_count: 1,
        factor_time,
        k: lifted.k.clone(),
        v_lo: lifted.v_lo.clone(),
        v_hi: lifted.v_hi.clone(),
        linmap: qp.linmap.clone(),
        nu: qp.nu,
        q: DVector::zeros(n),
        u: DVector::zeros(n),
        ku: DVector::zeros(n_v),
        v: DVector::zeros(n_v),
        v_old: DVector::zeros(n_v),
        gamma: DVector::zeros(n_v),
        tmp_v: DVector::zeros(n_v),
        rhs: DVector::zeros(n),
    })
}

impl AdmmWorkspace {
    pub fn dim(&self) -> usize {
        self.k.ncols()
    }

    pub fn n_v(&self) -> usize {
        self.k.nrows()
    }

    /// Number of factorizations performed since setup (always 1).
    pub fn factorizations(&self) -> usize {
        self.factor_count
    }

    pub fn factor_time(&self) -> Duration {
        self.factor_time
    }

    /// Solves `(J + ρKᵀK) x = b` with the cached factor.
    pub fn solve_system(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(Error::dim("rhs", self.dim(), b.len()));
        }
        let mut x = DVector::from_column_slice(b);
        self.factor.solve_mut(&mut x);
        Ok(x.as_slice().to_vec())
    }

    /// Replaces the stage-0 rate bounds after the applied input changed.
    pub fn update_u_prev(&mut self, set: &RateAmpSet) -> Result<()> {
        let n = self.dim();
        if set.dim() != n {
            return Err(Error::dim("constraint set", n, set.dim()));
        }
        for c in 0..self.nu {
            self.v_lo[n + c] = set.u_prev()[c] - set.rate()[c];
            self.v_hi[n + c] = set.u_prev()[c] + set.rate()[c];
        }
        Ok(())
    }

    /// Runs the iteration
    /// `(J + ρKᵀK) u_i = Kᵀ(ρ v_{i−1} − γ_{i−1}) − q`,
    /// `v_i = sat(K u_i + γ_{i−1}/ρ)`, `γ_i = γ_{i−1} + ρ(K u_i − v_i)`,
    /// for `max_iter` iterations or until the optional tolerance is met.
    pub fn solve(
        &mut self,
        x0: &[f64],
        warm: Option<&AdmmState>,
        reference: Option<&[f64]>,
    ) -> Result<(SolveResult, AdmmState)> {
        let (n, n_v) = (self.dim(), self.n_v());
        if x0.len() != self.linmap.ncols() {
            return Err(Error::dim("x0", self.linmap.ncols(), x0.len()));
        }
        if let Some(r) = reference {
            if r.len() != n {
                return Err(Error::dim("reference", n, r.len()));
            }
        }
        let clock = Stopwatch::start();
        self.q
            .gemv(1.0, &self.linmap, &DVector::from_column_slice(x0), 0.0);
        match warm {
            Some(s) => {
                if s.u.len() != n || s.v.len() != n_v || s.gamma.len() != n_v {
                    return Err(Error::dim(
                        "warm state",
                        n + 2 * n_v,
                        s.u.len() + s.v.len() + s.gamma.len(),
                    ));
                }
                self.u.copy_from_slice(&s.u);
                self.v.copy_from_slice(&s.v);
                self.gamma.copy_from_slice(&s.gamma);
            }
            None => {
                self.u.fill(0.0);
                self.v.fill(0.0);
                self.gamma.fill(0.0);
            }
        }

        let rho = self.cfg.rho;
        let mut trace = Vec::new();
        let mut iterations = 0;
        for i in 1..=self.cfg.max_iter {
            for j in 0..n_v {
                self.tmp_v[j] = rho * self.v[j] - self.gamma[j];
            }
            self.rhs.copy_from(&self.q);
            self.rhs.gemv_tr(1.0, &self.k, &self.tmp_v, -1.0);
            self.factor.solve_mut(&mut self.rhs);
            std::mem::swap(&mut self.u, &mut self.rhs);

            self.ku.gemv(1.0, &self.k, &self.u, 0.0);
            std::mem::swap(&mut self.v, &mut self.v_old);
            let mut primal = 0.0f64;
            for j in 0..n_v {
                let v = (self.ku[j] + self.gamma[j] / rho).clamp(self.v_lo[j], self.v_hi[j]);
                let res = self.ku[j] - v;
                self.v[j] = v;
                self.gamma[j] += rho * res;
                primal = primal.max(res.abs());
            }
            if !primal.is_finite() || self.u.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            iterations = i;

            if self.cfg.record_trace {
                let distance = reference.map(|r| l2_dist(self.u.as_slice(), r));
                let snapshot = (reference.is_none() && (i - 1) % self.cfg.trace_stride.max(1) == 0)
                    .then(|| self.u.as_slice().to_vec());
                if distance.is_some() || snapshot.is_some() {
                    trace.push(TraceEntry {
                        iteration: i,
                        distance,
                        snapshot,
                        elapsed: clock.elapsed(),
                        inner_sweeps: 0,
                        inner_step: 0.0,
                        primal_residual: primal,
                    });
                }
            }
            if let Some(tol) = self.cfg.tolerance {
                if primal <= tol && self.dual_residual() <= tol {
                    break;
                }
            }
        }

        let u_opt = self.u.as_slice().to_vec();
        let state = AdmmState {
            u: u_opt.clone(),
            v: self.v.as_slice().to_vec(),
            gamma: self.gamma.as_slice().to_vec(),
        };
        Ok((
            SolveResult {
                u0_control: u_opt[..self.nu].to_vec(),
                u_opt,
                iterations,
                trace,
                elapsed: clock.elapsed(),
                inner_sweeps: 0,
            },
            state,
        ))
    }

    /// `ρ‖Kᵀ(v_i − v_{i−1})‖∞` for the last iteration.
    fn dual_residual(&mut self) -> f64 {
        for j in 0..self.n_v() {
            self.tmp_v[j] = self.v[j] - self.v_old[j];
        }
        self.rhs.gemv_tr(self.cfg.rho, &self.k, &self.tmp_v, 0.0);
        self.rhs.amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::build_lifted;
    use nalgebra::dmatrix;

    fn scalar_qp() -> CondensedQp {
        CondensedQp::from_hessian(dmatrix![1.0], dmatrix![1.0], 1, 1).unwrap()
    }

    fn scalar_lifted() -> LiftedConstraints {
        LiftedConstraints {
            k: dmatrix![1.0; 1.0],
            v_lo: DVector::from_vec(vec![-1.0, -1.0]),
            v_hi: DVector::from_vec(vec![1.0, 1.0]),
            nu: 1,
            horizon: 1,
        }
    }

    #[test]
    fn scalar_box_reaches_bound() {
        let cfg = AdmmConfig {
            max_iter: 2000,
            ..AdmmConfig::default()
        };
        let mut ws = admm_setup(&scalar_qp(), &scalar_lifted(), cfg).unwrap();
        let (res, _) = ws.solve(&[-3.0], None, None).unwrap();
        assert!((res.u_opt[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn identity_system_halves_rhs() {
        let qp = CondensedQp::from_hessian(DMatrix::identity(3, 3), DMatrix::identity(3, 3), 1, 3)
            .unwrap();
        let lifted = LiftedConstraints {
            k: DMatrix::identity(3, 3),
            v_lo: DVector::from_element(3, -1.0),
            v_hi: DVector::from_element(3, 1.0),
            nu: 1,
            horizon: 3,
        };
        let ws = admm_setup(&qp, &lifted, AdmmConfig::default()).unwrap();
        let x = ws.solve_system(&[2.0, -4.0, 1.0]).unwrap();
        for (a, b) in x.iter().zip([1.0, -2.0, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn factorization_is_reused() {
        let j = dmatrix![4.0, 1.0, 0.0; 1.0, 3.0, 0.5; 0.0, 0.5, 2.0];
        let qp = CondensedQp::from_hessian(j.clone(), DMatrix::identity(3, 3), 1, 3).unwrap();
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 3).unwrap();
        let lifted = build_lifted(&set);
        let cfg = AdmmConfig {
            rho: 0.7,
            ..AdmmConfig::default()
        };
        let mut ws = admm_setup(&qp, &lifted, cfg).unwrap();
        let system = &j + 0.7 * lifted.k.transpose() * &lifted.k;
        for b in [[1.0, 2.0, 3.0], [-0.5, 0.0, 7.0]] {
            let x = ws.solve_system(&b).unwrap();
            let res = &system * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
            assert!(res.amax() <= 1e-10);
        }
        ws.solve(&[1.0, 0.0, -1.0], None, None).unwrap();
        ws.solve(&[0.0, 2.0, -1.0], None, None).unwrap();
        assert_eq!(ws.factorizations(), 1);
    }

    #[test]
    fn zero_linear_term_stays_at_origin() {
        let qp =
            CondensedQp::from_hessian(dmatrix![2.0, 0.5; 0.5, 1.0], DMatrix::identity(2, 2), 1, 2)
                .unwrap();
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 2).unwrap();
        let mut ws = admm_setup(&qp, &build_lifted(&set), AdmmConfig::default()).unwrap();
        let (res, state) = ws.solve(&[0.0, 0.0], None, None).unwrap();
        assert_eq!(res.u_opt, vec![0.0, 0.0]);
        assert!(state.gamma.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn tolerance_stops_early() {
        let qp =
            CondensedQp::from_hessian(dmatrix![2.0, 0.5; 0.5, 1.0], DMatrix::identity(2, 2), 1, 2)
                .unwrap();
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 2).unwrap();
        let cfg = AdmmConfig {
            max_iter: 100_000,
            tolerance: Some(1e-10),
            ..AdmmConfig::default()
        };
        let mut ws = admm_setup(&qp, &build_lifted(&set), cfg).unwrap();
        let (res, _) = ws.solve(&[3.0, -4.0], None, None).unwrap();
        assert!(res.iterations < 100_000);
        assert!(set.contains(&res.u_opt, 1e-9));
    }

    #[test]
    fn rejects_bad_rho() {
        let cfg = AdmmConfig {
            rho: 0.0,
            ..AdmmConfig::default()
        };
        assert!(admm_setup(&scalar_qp(), &scalar_lifted(), cfg).is_err());
    }

    #[test]
    fn shifted_state_moves_each_block() {
        let s = AdmmState {
            u: vec![1.0, 2.0],
            v: vec![1.0, 2.0, 3.0, 4.0],
            gamma: vec![5.0, 6.0, 7.0, 8.0],
        };
        let t = s.shifted(1);
        assert_eq!(t.u, vec![2.0, 2.0]);
        assert_eq!(t.v, vec![2.0, 2.0, 4.0, 4.0]);
        assert_eq!(t.gamma, vec![6.0, 6.0, 8.0, 8.0]);
    }
}
