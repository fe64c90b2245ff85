use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rateamp_core::mpc::build_qp;
use rateamp_core::{
    admm_setup, build_lifted, dykstra_project, fgm_setup, AdmmConfig, DykstraConfig, FgmConfig,
    MpcProblem, RateAmpSet,
};
use rateamp_harness::bench::write_csv;
use rateamp_harness::closed_loop::ModelConfig;
use rateamp_harness::{
    closed_loop_simulate, emit_plotdata, run_convergence_trace, run_timing_benchmark,
    summarize_timing, BenchmarkSpec, PlotKind, SolverChoice,
};
use serde::Deserialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "rateamp",
    version,
    about = "MPC with input rate and amplitude constraints: FGM+Dykstra vs ADMM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Fgm,
    Admm,
}

#[derive(Subcommand)]
enum Command {
    /// Dykstra projection of a trajectory read from a JSON file.
    Project {
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Solve one MPC problem from a problem file.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "fgm")]
        solver: Solver,
        #[arg(long, default_value_t = 100)]
        imax: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// JSON array with a previous trajectory (FGM) to warm-start from.
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Initial state as a JSON array; overrides `x0` in the problem file.
        #[arg(long)]
        x0: Option<PathBuf>,
    },
    /// Per-iteration timing of both solvers on random problems.
    BenchTiming {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Convergence traces of Dykstra and both solvers.
    BenchConverge {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Closed-loop simulation of a model config.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, value_enum, default_value = "fgm")]
        solver: Solver,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out/closed_loop.csv")]
        output: PathBuf,
    },
    /// Data files and a gnuplot script from a CSV written by the other commands.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        kind: PlotKind,
        #[arg(long, default_value = "out/plot")]
        out: PathBuf,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectInput {
    a: Vec<f64>,
    r: Vec<f64>,
    #[serde(default)]
    u_prev: Option<Vec<f64>>,
    #[serde(rename = "T")]
    horizon: usize,
    u: Vec<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Project {
            input,
            max_sweeps,
            tolerance,
            stride,
        } => {
            let p: ProjectInput = read_json(&input)?;
            let u_prev = p.u_prev.unwrap_or_else(|| vec![0.0; p.a.len()]);
            let set = RateAmpSet::new(p.a, p.r, u_prev, p.horizon)?;
            let cfg = DykstraConfig {
                max_sweeps,
                tolerance,
                check_stride: stride,
            };
            let (u, stats) = dykstra_project(&p.u, &set, &cfg)?;
            let out = json!({
                "u": u,
                "sweeps": stats.sweeps,
                "last_step": stats.last_step,
                "skipped": stats.skipped,
                "max_violation": set.max_violation(&u),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Solve {
            problem,
            solver,
            imax,
            rho,
            warm,
            x0,
        } => {
            let text = std::fs::read_to_string(&problem)
                .with_context(|| format!("reading {}", problem.display()))?;
            let prob = MpcProblem::from_json_str(&text)
                .with_context(|| format!("parsing {}", problem.display()))?;
            let x0 = match x0 {
                Some(path) => read_json::<Vec<f64>>(&path)?,
                None => match prob.x0.clone() {
                    Some(x) => x,
                    None => bail!("no initial state: add `x0` to the problem file or pass --x0"),
                },
            };
            let qp = build_qp(&prob.system, &prob.cost)?;
            let warm_u = warm.map(|p| read_json::<Vec<f64>>(&p)).transpose()?;
            let (res, name) = match solver {
                Solver::Fgm => {
                    let cfg = FgmConfig {
                        max_iter: imax,
                        ..FgmConfig::default()
                    };
                    let mut ws = fgm_setup(&qp, cfg)?;
                    (ws.solve(&x0, &prob.set, warm_u.as_deref(), None)?, "fgm")
                }
                Solver::Admm => {
                    let cfg = AdmmConfig {
                        rho,
                        max_iter: imax,
                        ..AdmmConfig::default()
                    };
                    let mut ws = admm_setup(&qp, &build_lifted(&prob.set), cfg)?;
                    (ws.solve(&x0, None, None)?.0, "admm")
                }
            };
            let out = json!({
                "solver": name,
                "u_opt": res.u_opt,
                "u0": res.u0_control,
                "iterations": res.iterations,
                "elapsed_ns": res.elapsed.as_nanos() as u64,
                "max_violation": prob.set.max_violation(&res.u_opt),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::BenchTiming { config, output } => {
            let spec = match config {
                Some(p) => BenchmarkSpec::from_path(&p)?,
                None => BenchmarkSpec::timing_default(),
            };
            std::fs::create_dir_all(&output)?;
            let records = run_timing_benchmark(&spec)?;
            write_csv(&output.join("timing_raw.csv"), &records)?;
            let summary = summarize_timing(&records);
            write_csv(&output.join("timing.csv"), &summary)?;
            println!(
                "{:>4} {:>14} {:>14} {:>10}",
                "T", "fgm ns/iter", "admm ns/iter", "ratio"
            );
            for &t in &spec.horizons {
                let get = |s: &str| {
                    summary
                        .iter()
                        .find(|r| r.horizon == t && r.solver == s)
                        .map(|r| r.mean_ns_per_iter)
                };
                if let (Some(f), Some(a)) = (get("fgm"), get("admm")) {
                    println!("{t:>4} {f:>14.1} {a:>14.1} {:>10.3}", f / a);
                }
            }
        }
        Command::BenchConverge { config, output } => {
            let spec = match config {
                Some(p) => BenchmarkSpec::from_path(&p)?,
                None => BenchmarkSpec::convergence_default(),
            };
            std::fs::create_dir_all(&output)?;
            let rows = run_convergence_trace(&spec)?;
            let path = output.join("convergence.csv");
            write_csv(&path, &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        Command::Simulate {
            model,
            steps,
            horizon,
            solver,
            seed,
            output,
        } => {
            let cfg = ModelConfig::from_path(&model)?;
            let choice = match solver {
                Solver::Fgm => SolverChoice::fgm_default(),
                Solver::Admm => SolverChoice::admm_default(),
            };
            let trace = closed_loop_simulate(&cfg, choice, horizon, steps, seed)?;
            ensure_parent(&output)?;
            trace.write_csv(&output)?;
            let worst_amp = trace
                .records
                .iter()
                .map(|r| r.amplitude_margin)
                .fold(f64::INFINITY, f64::min);
            let worst_rate = trace
                .records
                .iter()
                .map(|r| r.rate_margin)
                .fold(f64::INFINITY, f64::min);
            println!(
                "{} steps with {}: min amplitude margin {worst_amp:.3e}, min rate margin {worst_rate:.3e}; wrote {}",
                trace.records.len(),
                trace.solver,
                output.display()
            );
        }
        Command::Plot { csv, kind, out } => {
            let res = emit_plotdata(&csv, kind, &out)?;
            println!(
                "wrote {} data files and {}",
                res.data_files.len(),
                res.script.display()
            );
        }
    }
    Ok(())
}
