use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rateamp_core::oracle::{active_set_project, reference_solve, ROW_GUARD};
use rateamp_core::{
    admm_setup, build_lifted, fgm_setup, CondensedQp, DykstraConfig, DykstraWorkspace, RateAmpSet,
};
use serde::{Deserialize, Serialize};

use crate::bench::instance_seed;
use crate::error::Result;
use crate::random::gen_random_problem;
use crate::settings::BenchmarkSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub experiment: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub iteration: usize,
    pub mean_distance: f64,
}

/// Distance of Dykstra iterates to an oracle projection, per sweep.
#[derive(Clone, Debug)]
pub struct DykstraTrace {
    pub horizon: usize,
    pub start_std: f64,
    /// `mean[j]` is the average distance after sweep `j + 1`.
    pub mean: Vec<f64>,
    /// Per-start distance after the last sweep.
    pub finals: Vec<f64>,
}

/// Exact projection of `p` onto `set`: active-set enumeration inside its
/// row guard, otherwise the reference solve of `min ½‖u‖² − pᵀu`.
pub fn oracle_projection(p: &[f64], set: &RateAmpSet) -> Result<Vec<f64>> {
    let lifted = build_lifted(set);
    if lifted.n_v() <= ROW_GUARD {
        return Ok(active_set_project(p, &lifted)?.0);
    }
    let n = p.len();
    let qp = CondensedQp::from_hessian(
        DMatrix::identity(n, n),
        DMatrix::identity(n, n),
        set.n_u(),
        set.horizon(),
    )?;
    let x0: Vec<f64> = p.iter().map(|v| -v).collect();
    Ok(reference_solve(&qp, &x0, set)?.u)
}

/// Projects `starts` Gaussian points (std `start_std`) onto the unit rate
/// and amplitude set for a fixed number of sweeps.
pub fn dykstra_trace(
    t: usize,
    start_std: f64,
    starts: usize,
    sweeps: usize,
    seed: u64,
) -> Result<DykstraTrace> {
    let set = RateAmpSet::scalar(1.0, 1.0, 0.0, t)?;
    let cfg = DykstraConfig {
        max_sweeps: sweeps,
        tolerance: 0.0,
        check_stride: 10,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ws = DykstraWorkspace::new(t);
    let mut out = vec![0.0; t];
    let mut sum = vec![0.0; sweeps];
    let mut finals = Vec::with_capacity(starts);
    for _ in 0..starts {
        let p: Vec<f64> = (0..t)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                start_std * z
            })
            .collect();
        let star = oracle_projection(&p, &set)?;
        let mut dists = Vec::with_capacity(sweeps);
        let stats = ws.project_observed(&p, &set, &cfg, &mut out, |_, x| dists.push(l2(x, &star)));
        if stats.skipped {
            dists = vec![l2(&out, &star); sweeps];
        }
        for (s, d) in sum.iter_mut().zip(&dists) {
            *s += d;
        }
        finals.push(*dists.last().unwrap_or(&0.0));
    }
    Ok(DykstraTrace {
        horizon: t,
        start_std,
        mean: sum.into_iter().map(|s| s / starts as f64).collect(),
        finals,
    })
}

/// `‖u_i − u*‖₂` per outer iteration for both solvers on random QPs.
#[derive(Clone, Debug)]
pub struct SolverTraces {
    pub horizon: usize,
    pub fgm_mean: Vec<f64>,
    pub admm_mean: Vec<f64>,
    pub fgm_finals: Vec<f64>,
    pub admm_finals: Vec<f64>,
    /// Largest KKT residual among the reference solutions.
    pub worst_reference_kkt: f64,
}

pub fn solver_traces(spec: &BenchmarkSpec, t: usize) -> Result<SolverTraces> {
    let mut fgm_cfg = spec.fgm.config();
    fgm_cfg.record_trace = true;
    fgm_cfg.early_stop = None;
    let mut admm_cfg = spec.admm.config();
    admm_cfg.record_trace = true;
    admm_cfg.tolerance = None;

    let mut fgm_sum = vec![0.0; fgm_cfg.max_iter];
    let mut admm_sum = vec![0.0; admm_cfg.max_iter];
    let (mut fgm_finals, mut admm_finals) = (Vec::new(), Vec::new());
    let mut worst_kkt = 0.0f64;
    for i in 0..spec.instances {
        let prob = gen_random_problem(
            t,
            spec.n_u,
            instance_seed(spec.seed, t, i),
            spec.cond_target,
            spec.x0_std,
        )?;
        let x0 = prob.draw_x0(0);
        let reference = reference_solve(&prob.qp, &x0, &prob.set)?;
        worst_kkt = worst_kkt.max(reference.kkt_residual);

        let mut fgm = fgm_setup(&prob.qp, fgm_cfg)?;
        let res = fgm.solve(&x0, &prob.set, None, Some(&reference.u))?;
        accumulate(&mut fgm_sum, &res.trace);
        fgm_finals.push(l2(&res.u_opt, &reference.u));

        let mut admm = admm_setup(&prob.qp, &build_lifted(&prob.set), admm_cfg)?;
        let (res, _) = admm.solve(&x0, None, Some(&reference.u))?;
        accumulate(&mut admm_sum, &res.trace);
        admm_finals.push(l2(&res.u_opt, &reference.u));
    }
    let k = spec.instances as f64;
    Ok(SolverTraces {
        horizon: t,
        fgm_mean: fgm_sum.into_iter().map(|s| s / k).collect(),
        admm_mean: admm_sum.into_iter().map(|s| s / k).collect(),
        fgm_finals,
        admm_finals,
        worst_reference_kkt: worst_kkt,
    })
}

fn accumulate(sum: &mut [f64], trace: &[rateamp_core::TraceEntry]) {
    for e in trace {
        if let Some(d) = e.distance {
            sum[e.iteration - 1] += d;
        }
    }
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// All traces as CSV rows: `dykstra_std<σ>` for every starting spread and
/// `fgm` / `admm` for the solvers, each over every horizon.
pub fn run_convergence_trace(spec: &BenchmarkSpec) -> Result<Vec<ConvergenceRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &std in &spec.start_stds {
        let name = format!("dykstra_std{std}");
        for &t in &spec.horizons {
            let trace = dykstra_trace(
                t,
                std,
                spec.instances,
                spec.dykstra_sweeps,
                instance_seed(spec.seed, t, std as usize),
            )?;
            push_rows(&mut rows, &name, t, &trace.mean);
        }
    }
    for &t in &spec.horizons {
        let traces = solver_traces(spec, t)?;
        push_rows(&mut rows, "fgm", t, &traces.fgm_mean);
        push_rows(&mut rows, "admm", t, &traces.admm_mean);
    }
    Ok(rows)
}

fn push_rows(rows: &mut Vec<ConvergenceRow>, experiment: &str, t: usize, mean: &[f64]) {
    rows.extend(mean.iter().enumerate().map(|(i, &d)| ConvergenceRow {
        experiment: experiment.to_string(),
        horizon: t,
        iteration: i + 1,
        mean_distance: d,
    }));
}
