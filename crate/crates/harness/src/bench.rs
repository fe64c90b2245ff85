use std::path::Path;

use rateamp_core::clock::Stopwatch;
use rateamp_core::{admm_setup, build_lifted, fgm_setup};
use serde::{Deserialize, Serialize};

use crate::error::{csv_err, Result};
use crate::random::gen_random_problem;
use crate::settings::BenchmarkSpec;

/// One instance's timing for one solver, persisted verbatim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub solver: String,
    pub instance: usize,
    /// Outer iterations per timed solve.
    pub iterations: usize,
    pub repeats: usize,
    /// Wall time of all timed solves together.
    pub total_ns: f64,
    pub per_iter_ns: f64,
    /// One-time setup: `M` and `β` for FGM, assembly and factorization for ADMM.
    pub setup_ns: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub solver: String,
    pub instances: usize,
    pub iterations: usize,
    pub mean_ns_per_iter: f64,
    pub median_ns_per_iter: f64,
    pub mean_setup_ns: f64,
    /// Mean per-iteration time when the setup is charged to a single solve.
    pub mean_ns_per_iter_incl_setup: f64,
}

pub(crate) fn instance_seed(seed: u64, horizon: usize, instance: usize) -> u64 {
    seed ^ ((horizon as u64) << 40) ^ ((instance as u64) << 20)
}

/// Times a fixed number of outer iterations of both solvers on every
/// instance. Each instance gets one discarded warm-up solve and then
/// `repeats` timed cold-start solves; runs are sequential.
pub fn run_timing_benchmark(spec: &BenchmarkSpec) -> Result<Vec<TimingRecord>> {
    spec.validate()?;
    let mut fgm_cfg = spec.fgm.config();
    fgm_cfg.early_stop = None;
    let mut admm_cfg = spec.admm.config();
    admm_cfg.tolerance = None;

    let mut records = Vec::new();
    for &t in &spec.horizons {
        for i in 0..spec.instances {
            let prob = gen_random_problem(
                t,
                spec.n_u,
                instance_seed(spec.seed, t, i),
                spec.cond_target,
                spec.x0_std,
            )?;
            let x0 = prob.draw_x0(0);

            let clock = Stopwatch::start();
            let mut fgm = fgm_setup(&prob.qp, fgm_cfg)?;
            let setup = clock.elapsed();
            let res = fgm.solve(&x0, &prob.set, None, None)?;
            let clock = Stopwatch::start();
            for _ in 0..spec.repeats {
                fgm.solve(&x0, &prob.set, None, None)?;
            }
            records.push(record(
                t,
                "fgm",
                i,
                res.iterations,
                spec.repeats,
                clock.elapsed(),
                setup,
            ));

            let lifted = build_lifted(&prob.set);
            let mut admm = admm_setup(&prob.qp, &lifted, admm_cfg)?;
            let setup = admm.factor_time();
            let (res, _) = admm.solve(&x0, None, None)?;
            let clock = Stopwatch::start();
            for _ in 0..spec.repeats {
                admm.solve(&x0, None, None)?;
            }
            records.push(record(
                t,
                "admm",
                i,
                res.iterations,
                spec.repeats,
                clock.elapsed(),
                setup,
            ));
        }
    }
    Ok(records)
}

fn record(
    horizon: usize,
    solver: &str,
    instance: usize,
    iterations: usize,
    repeats: usize,
    total: std::time::Duration,
    setup: std::time::Duration,
) -> TimingRecord {
    let total_ns = total.as_nanos() as f64;
    TimingRecord {
        horizon,
        solver: solver.to_string(),
        instance,
        iterations,
        repeats,
        total_ns,
        per_iter_ns: total_ns / (repeats * iterations) as f64,
        setup_ns: setup.as_nanos() as f64,
    }
}

/// Mean and median per (horizon, solver), recomputed from raw records.
pub fn summarize_timing(records: &[TimingRecord]) -> Vec<TimingSummary> {
    let mut keys: Vec<(usize, String)> = Vec::new();
    for r in records {
        let key = (r.horizon, r.solver.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(horizon, solver)| {
            let group: Vec<&TimingRecord> = records
                .iter()
                .filter(|r| r.horizon == horizon && r.solver == solver)
                .collect();
            let per_iter: Vec<f64> = group.iter().map(|r| r.per_iter_ns).collect();
            let incl: Vec<f64> = group
                .iter()
                .map(|r| r.per_iter_ns + r.setup_ns / r.iterations as f64)
                .collect();
            TimingSummary {
                horizon,
                solver,
                instances: group.len(),
                iterations: group[0].iterations,
                mean_ns_per_iter: mean(&per_iter),
                median_ns_per_iter: median(&per_iter),
                mean_setup_ns: mean(&group.iter().map(|r| r.setup_ns).collect::<Vec<_>>()),
                mean_ns_per_iter_incl_setup: mean(&incl),
            }
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(crate::error::io_err(path))?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .map(|row| row.map_err(csv_err(path)))
        .collect()
}
