use nalgebra::{DMatrix, DVector};

use super::{inf_dist, l2_dist, shift_stages, SolveResult, TraceEntry};
use crate::clock::Stopwatch;
use crate::mpc::{fgm_step_size, CondensedQp};
use crate::projection::{DykstraConfig, DykstraWorkspace, RateAmpSet};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FgmConfig {
    /// Number of outer iterations `I_max`; no termination criterion is used
    /// unless `early_stop` is set.
    pub max_iter: usize,
    pub dykstra: DykstraConfig,
    pub warm_start: bool,
    pub record_trace: bool,
    /// Snapshot stride when tracing without a reference.
    pub trace_stride: usize,
    /// Optional stop on `‖u_{i+1} − u_i‖∞ < threshold`.
    pub early_stop: Option<f64>,
}

impl Default for FgmConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            dykstra: DykstraConfig::INNER_FIXED,
            warm_start: true,
            record_trace: false,
            trace_stride: 1,
            early_stop: None,
        }
    }
}

/// Precomputed data and buffers for the fast gradient method with Dykstra projection.
#[derive(Clone, Debug)]
pub struct FgmWorkspace {
    step_matrix: DMatrix<f64>,
    scaled_linmap: DMatrix<f64>,
    beta: f64,
    lambda_min: f64,
    lambda_max: f64,
    nu: usize,
    horizon: usize,
    pub cfg: FgmConfig,
    y: DVector<f64>,
    u: DVector<f64>,
    u_next: DVector<f64>,
    t: DVector<f64>,
    q_scaled: DVector<f64>,
    dykstra: DykstraWorkspace,
}

pub fn fgm_setup(qp: &CondensedQp, cfg: FgmConfig) -> Result<FgmWorkspace> {
    if cfg.max_iter == 0 {
        return Err(Error::invalid("I_max", "must be >= 1"));
    }
    let beta = fgm_step_size(qp.lambda_min, qp.lambda_max)?;
    let n = qp.dim();
    let step_matrix = DMatrix::<f64>::identity(n, n) - &qp.j / qp.lambda_max;
    Ok(FgmWorkspace {
        step_matrix,
        scaled_linmap: &qp.linmap / qp.lambda_max,
        beta,
        lambda_min: qp.lambda_min,
        lambda_max: qp.lambda_max,
        nu: qp.nu,
        horizon: qp.horizon,
        cfg,
        y: DVector::zeros(n),
        u: DVector::zeros(n),
        u_next: DVector::zeros(n),
        t: DVector::zeros(n),
        q_scaled: DVector::zeros(n),
        dykstra: DykstraWorkspace::new(n),
    })
}

impl FgmWorkspace {
    /// `M = I − J/λmax`.
    pub fn step_matrix(&self) -> &DMatrix<f64> {
        &self.step_matrix
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Contraction factor `1 − λmin/λmax` of the gradient step.
    pub fn contraction(&self) -> f64 {
        1.0 - self.lambda_min / self.lambda_max
    }

    pub fn dim(&self) -> usize {
        self.nu * self.horizon
    }

    /// Runs `I_max` iterations of
    /// `t_i = M y_i − q/λmax`, `u_{i+1} = P_U(t_i)` (Dykstra),
    /// `y_{i+1} = (1+β) u_{i+1} − β u_i`.
    ///
    /// With `warm_start` enabled and a previous trajectory supplied, the
    /// iteration starts from that trajectory shifted by one stage; otherwise
    /// from zero.
    pub fn solve(
        &mut self,
        x0: &[f64],
        set: &RateAmpSet,
        warm: Option<&[f64]>,
        reference: Option<&[f64]>,
    ) -> Result<SolveResult> {
        let n = self.dim();
        if x0.len() != self.scaled_linmap.ncols() {
            return Err(Error::dim("x0", self.scaled_linmap.ncols(), x0.len()));
        }
        if set.dim() != n || set.n_u() != self.nu {
            return Err(Error::dim("constraint set", n, set.dim()));
        }
        if let Some(r) = reference {
            if r.len() != n {
                return Err(Error::dim("reference", n, r.len()));
            }
        }

        let clock = Stopwatch::start();
        self.q_scaled.gemv(
            1.0,
            &self.scaled_linmap,
            &DVector::from_column_slice(x0),
            0.0,
        );
        match warm.filter(|_| self.cfg.warm_start) {
            Some(prev) => {
                if prev.len() != n {
                    return Err(Error::dim("warm start", n, prev.len()));
                }
                self.u.copy_from_slice(&shift_stages(prev, self.nu));
            }
            None => self.u.fill(0.0),
        }
        self.y.copy_from(&self.u);

        let beta = self.beta;
        let mut trace = Vec::new();
        let mut inner_total = 0;
        let mut iterations = 0;
        for i in 1..=self.cfg.max_iter {
            self.t.copy_from(&self.q_scaled);
            self.t.gemv(1.0, &self.step_matrix, &self.y, -1.0);
            let stats = self.dykstra.project(
                self.t.as_slice(),
                set,
                &self.cfg.dykstra,
                self.u_next.as_mut_slice(),
            );
            inner_total += stats.sweeps;
            if self.u_next.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            for k in 0..n {
                self.y[k] = (1.0 + beta) * self.u_next[k] - beta * self.u[k];
            }
            let change = inf_dist(self.u_next.as_slice(), self.u.as_slice());
            std::mem::swap(&mut self.u, &mut self.u_next);
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
                        inner_sweeps: stats.sweeps,
                        inner_step: stats.last_step,
                        primal_residual: 0.0,
                    });
                }
            }
            if self.cfg.early_stop.is_some_and(|th| change < th) {
                break;
            }
        }

        let u_opt = self.u.as_slice().to_vec();
        Ok(SolveResult {
            u0_control: u_opt[..self.nu].to_vec(),
            u_opt,
            iterations,
            trace,
            elapsed: clock.elapsed(),
            inner_sweeps: inner_total,
        })
    }
}
