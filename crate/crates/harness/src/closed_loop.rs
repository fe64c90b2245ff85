use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rateamp_core::clock::Stopwatch;
use rateamp_core::mpc::build_qp;
use rateamp_core::{
    admm_setup, build_lifted, fgm_setup, AdmmConfig, AdmmState, CostSpec, FgmConfig, LinearSystem,
    RateAmpSet,
};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

/// Plant, weights and input limits for the closed-loop example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub note: Option<String>,
    pub labels: Vec<String>,
    #[serde(rename = "Ts")]
    pub ts: f64,
    #[serde(rename = "A")]
    pub a_matrix: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b_matrix: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    pub r_weight: Vec<Vec<f64>>,
    /// Amplitude limits per input.
    pub a: Vec<f64>,
    /// Per-step rate limits per input.
    pub r: Vec<f64>,
    pub horizons: Vec<usize>,
    /// Norm of the random initial state.
    pub x0_amplitude: f64,
}

fn matrix(rows: &[Vec<f64>], field: &'static str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != ncols) {
        return Err(HarnessError::Config {
            field,
            reason: "rows must be non-empty and of equal length".into(),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl ModelConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.system()?;
        if cfg.labels.len() != cfg.a.len() {
            return Err(HarnessError::Config {
                field: "labels",
                reason: format!("{} labels for {} inputs", cfg.labels.len(), cfg.a.len()),
            });
        }
        Ok(cfg)
    }

    pub fn system(&self) -> Result<LinearSystem> {
        Ok(LinearSystem::new(
            matrix(&self.a_matrix, "A")?,
            matrix(&self.b_matrix, "B")?,
            self.ts,
        )?)
    }

    pub fn cost(&self, horizon: usize) -> Result<CostSpec> {
        Ok(CostSpec::new(
            matrix(&self.q, "Q")?,
            matrix(&self.r_weight, "R")?,
            None,
            horizon,
        )?)
    }

    pub fn set(&self, horizon: usize) -> Result<RateAmpSet> {
        Ok(RateAmpSet::new(
            self.a.clone(),
            self.r.clone(),
            vec![0.0; self.a.len()],
            horizon,
        )?)
    }

    pub fn nx(&self) -> usize {
        self.a_matrix.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolverChoice {
    Fgm(FgmConfig),
    Admm(AdmmConfig),
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Fgm(_) => "fgm",
            SolverChoice::Admm(_) => "admm",
        }
    }

    /// FGM with warm start, a 2000-iteration cap and the `1e-6` early stop.
    pub fn fgm_default() -> Self {
        SolverChoice::Fgm(FgmConfig {
            max_iter: 2000,
            early_stop: Some(1e-6),
            ..FgmConfig::default()
        })
    }

    /// ADMM stopping at `1e-9` residuals, capped at 20000 iterations.
    pub fn admm_default() -> Self {
        SolverChoice::Admm(AdmmConfig {
            max_iter: 20_000,
            tolerance: Some(1e-9),
            ..AdmmConfig::default()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub iterations: usize,
    pub solve_ns: u128,
    /// `min_c (a_c − |u_c|)`.
    pub amplitude_margin: f64,
    /// `min_c (r_c − |u_c − u_prev,c|)` against the previously applied input.
    pub rate_margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedLoopTrace {
    pub model: String,
    pub solver: &'static str,
    pub horizon: usize,
    pub labels: Vec<String>,
    pub records: Vec<StepRecord>,
    /// State after the last applied input.
    pub final_state: Vec<f64>,
}

impl ClosedLoopTrace {
    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.records
            .iter()
            .map(|r| r.x.as_slice())
            .chain(std::iter::once(self.final_state.as_slice()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let nx = self.final_state.len();
        let mut header = vec!["step".to_string()];
        header.extend((0..nx).map(|i| format!("x{i}")));
        header.extend(self.labels.iter().map(|l| format!("u_{l}")));
        header.extend(
            ["iterations", "solve_ns", "amplitude_margin", "rate_margin"].map(String::from),
        );
        let mut w = csv::Writer::from_path(path).map_err(crate::error::csv_err(path))?;
        w.write_record(&header)
            .map_err(crate::error::csv_err(path))?;
        for r in &self.records {
            let mut row = vec![r.step.to_string()];
            row.extend(r.x.iter().map(f64::to_string));
            row.extend(r.u.iter().map(f64::to_string));
            row.extend([
                r.iterations.to_string(),
                r.solve_ns.to_string(),
                r.amplitude_margin.to_string(),
                r.rate_margin.to_string(),
            ]);
            w.write_record(&row).map_err(crate::error::csv_err(path))?;
        }
        w.flush().map_err(io_err(path))?;
        Ok(())
    }
}

/// Simulates from a random initial state of norm `x0_amplitude`.
pub fn closed_loop_simulate(
    model: &ModelConfig,
    solver: SolverChoice,
    horizon: usize,
    steps: usize,
    seed: u64,
) -> Result<ClosedLoopTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<f64> = (0..model.nx())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x0: Vec<f64> = dir.iter().map(|v| model.x0_amplitude * v / norm).collect();
    closed_loop_from(model, solver, horizon, steps, &x0)
}

/// Receding-horizon loop: solve warm-started, apply `u*_0`, advance the
/// plant, and make the applied input the next `u_{−1}`.
pub fn closed_loop_from(
    model: &ModelConfig,
    solver: SolverChoice,
    horizon: usize,
    steps: usize,
    x0: &[f64],
) -> Result<ClosedLoopTrace> {
    if steps == 0 {
        return Err(HarnessError::Config {
            field: "steps",
            reason: "must be >= 1".into(),
        });
    }
    let sys = model.system()?;
    let qp = build_qp(&sys, &model.cost(horizon)?)?;
    let mut set = model.set(horizon)?;
    let nu = sys.nu();

    enum Runner {
        Fgm(rateamp_core::FgmWorkspace, Option<Vec<f64>>),
        Admm(rateamp_core::AdmmWorkspace, Option<AdmmState>),
    }
    let mut runner = match solver {
        SolverChoice::Fgm(cfg) => Runner::Fgm(fgm_setup(&qp, cfg)?, None),
        SolverChoice::Admm(cfg) => Runner::Admm(admm_setup(&qp, &build_lifted(&set), cfg)?, None),
    };

    let mut x = x0.to_vec();
    let mut records = Vec::with_capacity(steps);
    let step_err = |step| move |source| HarnessError::Step { step, source };
    for step in 0..steps {
        let clock = Stopwatch::start();
        let (u, iterations) = match &mut runner {
            Runner::Fgm(ws, prev) => {
                let res = ws
                    .solve(&x, &set, prev.as_deref(), None)
                    .map_err(step_err(step))?;
                *prev = Some(res.u_opt);
                (res.u0_control, res.iterations)
            }
            Runner::Admm(ws, prev) => {
                ws.update_u_prev(&set).map_err(step_err(step))?;
                let warm = prev.as_ref().map(|s| s.shifted(nu));
                let (res, state) = ws.solve(&x, warm.as_ref(), None).map_err(step_err(step))?;
                *prev = Some(state);
                (res.u0_control, res.iterations)
            }
        };
        let solve_ns = clock.elapsed().as_nanos();
        let amplitude_margin = (0..nu)
            .map(|c| set.amplitude()[c] - u[c].abs())
            .fold(f64::INFINITY, f64::min);
        let rate_margin = (0..nu)
            .map(|c| set.rate()[c] - (u[c] - set.u_prev()[c]).abs())
            .fold(f64::INFINITY, f64::min);
        let next = sys.step(&x, &u);
        set.set_u_prev(&u).map_err(step_err(step))?;
        records.push(StepRecord {
            step,
            x: std::mem::replace(&mut x, next),
            u,
            iterations,
            solve_ns,
            amplitude_margin,
            rate_margin,
        });
    }
    Ok(ClosedLoopTrace {
        model: model.name.clone(),
        solver: solver.name(),
        horizon,
        labels: model.labels.clone(),
        records,
        final_state: x,
    })
}
