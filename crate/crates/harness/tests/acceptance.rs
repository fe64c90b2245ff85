//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rateamp_core::oracle::{
    active_set_project, active_set_project_polyhedron, dp_rate_project, grid_project_2d,
    reference_solve, Polyhedron,
};
use rateamp_core::solvers::memory_footprint;
use rateamp_core::{
    admm_setup, build_lifted, dykstra_project, fgm_setup, fgm_step_size, project_pair, solve_dare,
    AdmmConfig, DykstraConfig, FgmConfig, LinearSystem, PairBounds, RateAmpSet,
};
use rateamp_harness::closed_loop::ModelConfig;
use rateamp_harness::{
    closed_loop_simulate, dykstra_trace, gen_random_problem, run_timing_benchmark,
    summarize_timing, BenchmarkSpec, SolverChoice,
};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    check(t <= limit, format!("runtime {t:.2?} exceeds {limit:?}"))?;
    Ok(t)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn pair_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_as, mut worst_grid) = (0.0f64, 0.0f64);
    let cases = 10_000;
    for _ in 0..cases {
        let a: f64 = rng.random_range(0.1..10.0);
        let r: f64 = rng.random_range(0.0..2.0 * a);
        let r = r.max(1e-3 * a);
        let u_prev = rng.random_range(-a..=a);
        let b = if rng.random_bool(0.5) {
            PairBounds::first(a, r, u_prev)
        } else {
            PairBounds::interior(a, r)
        };
        let pt = [
            rng.random_range(-5.0 * a..5.0 * a),
            rng.random_range(-5.0 * a..5.0 * a),
        ];
        let z = project_pair(pt, &b);
        let (exact, cert) = active_set_project_polyhedron(&pt, &Polyhedron::from_pair(&b))
            .map_err(|e| e.to_string())?;
        check(
            cert.is_valid(1e-9 * a),
            format!("active-set certificate rejected at {pt:?}"),
        )?;
        let grid = grid_project_2d(pt, &b);
        worst_as = worst_as.max(max_abs(&z, &exact) / a.max(1.0));
        worst_grid = worst_grid.max(max_abs(&z, &grid) / a.max(1.0));
    }
    check(
        worst_as <= 1e-10,
        format!("active-set deviation {worst_as:.2e} > 1e-10"),
    )?;
    check(
        worst_grid <= 1e-6,
        format!("grid deviation {worst_grid:.2e} > 1e-6"),
    )?;
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!(
        "{cases} cases, max dev active-set {worst_as:.1e}, grid {worst_grid:.1e}, {t:.2?}"
    ))
}

fn dykstra_correctness() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for t in [4usize, 8] {
        for std in [10.0, 100.0] {
            let tr = dykstra_trace(t, std, 100, 1000, 7 + t as u64).map_err(|e| e.to_string())?;
            let worst = tr.finals.iter().copied().fold(0.0, f64::max);
            check(
                worst <= 1e-6,
                format!("T={t} std={std}: final distance {worst:.2e} > 1e-6"),
            )?;
            let (m1, m10, m100) = (tr.mean[0], tr.mean[9], tr.mean[99]);
            check(
                m1 > m10 && m10 > m100,
                format!("T={t} std={std}: mean distance not decreasing: {m1:.3e}, {m10:.3e}, {m100:.3e}"),
            )?;
            notes.push(format!(
                "T={t}/std{std}: {m1:.1e}>{m10:.1e}>{m100:.1e}, worst final {worst:.1e}"
            ));
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{}; {t:.2?}", notes.join("; ")))
}

fn solver_agreement() -> Outcome {
    let start = Instant::now();
    let fgm_cfg = FgmConfig {
        max_iter: 3000,
        dykstra: DykstraConfig::STANDALONE,
        warm_start: false,
        ..FgmConfig::default()
    };
    let admm_cfg = AdmmConfig {
        max_iter: 200_000,
        tolerance: Some(1e-10),
        ..AdmmConfig::default()
    };
    let (mut worst_fgm, mut worst_admm, mut worst_kkt) = (0.0f64, 0.0f64, 0.0f64);
    for t in [4usize, 8, 16] {
        for i in 0..20u64 {
            let prob = gen_random_problem(t, 1, 5000 + 100 * t as u64 + i, 100.0, 10.0)
                .map_err(|e| e.to_string())?;
            let x0 = prob.draw_x0(0);
            let reference = reference_solve(&prob.qp, &x0, &prob.set).map_err(|e| e.to_string())?;
            check(
                reference.kkt_residual <= 1e-8,
                format!("T={t} #{i}: reference KKT {:.2e}", reference.kkt_residual),
            )?;
            worst_kkt = worst_kkt.max(reference.kkt_residual);

            let mut fgm = fgm_setup(&prob.qp, fgm_cfg).map_err(|e| e.to_string())?;
            let u_fgm = fgm
                .solve(&x0, &prob.set, None, None)
                .map_err(|e| e.to_string())?
                .u_opt;
            let mut admm = admm_setup(&prob.qp, &build_lifted(&prob.set), admm_cfg)
                .map_err(|e| e.to_string())?;
            let u_admm = admm
                .solve(&x0, None, None)
                .map_err(|e| e.to_string())?
                .0
                .u_opt;
            let (df, da) = (l2(&u_fgm, &reference.u), l2(&u_admm, &reference.u));
            check(
                df <= 1e-4,
                format!("T={t} #{i}: FGM distance {df:.2e} > 1e-4"),
            )?;
            check(
                da <= 1e-4,
                format!("T={t} #{i}: ADMM distance {da:.2e} > 1e-4"),
            )?;
            worst_fgm = worst_fgm.max(df);
            worst_admm = worst_admm.max(da);
        }
    }
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!(
        "60 instances, worst FGM {worst_fgm:.1e}, ADMM {worst_admm:.1e}, reference KKT {worst_kkt:.1e}, {t:.2?}"
    ))
}

fn timing_direction() -> Outcome {
    let spec = BenchmarkSpec::timing_default();
    let summary = summarize_timing(&run_timing_benchmark(&spec).map_err(|e| e.to_string())?);
    let get = |t: usize, s: &str| {
        summary
            .iter()
            .find(|r| r.horizon == t && r.solver == s)
            .cloned()
    };
    let mut table = vec![format!(
        "    {:>4} {:>12} {:>12} {:>8} {:>14} {:>14} {:>8}",
        "T", "fgm ns/it", "admm ns/it", "ratio", "fgm incl", "admm incl", "ratio"
    )];
    let mut ok = true;
    let mut ratios = Vec::new();
    for &t in &spec.horizons {
        let (f, a) = get(t, "fgm")
            .zip(get(t, "admm"))
            .ok_or(format!("missing rows for T={t}"))?;
        let ratio = f.mean_ns_per_iter / a.mean_ns_per_iter;
        let incl = f.mean_ns_per_iter_incl_setup / a.mean_ns_per_iter_incl_setup;
        ok &= ratio < 1.0;
        ratios.push(format!("T={t}: {ratio:.3}"));
        table.push(format!(
            "    {t:>4} {:>12.1} {:>12.1} {ratio:>8.3} {:>14.1} {:>14.1} {incl:>8.3}",
            f.mean_ns_per_iter,
            a.mean_ns_per_iter,
            f.mean_ns_per_iter_incl_setup,
            a.mean_ns_per_iter_incl_setup
        ));
    }
    let joined = table.join("\n");
    if ok {
        println!("{joined}");
        Ok(format!(
            "FGM/ADMM per-iteration ratio {}",
            ratios.join(", ")
        ))
    } else {
        println!("{joined}");
        Err(format!(
            "FGM/ADMM per-iteration ratio not below 1: {}",
            ratios.join(", ")
        ))
    }
}

fn memory_accounting() -> Outcome {
    let at64 = memory_footprint(1, 64);
    check(
        at64.formula_ratio <= 0.55,
        format!("ratio at T=64 is {:.4}", at64.formula_ratio),
    )?;
    let seq: Vec<f64> = [4, 16, 64, 256, 4096]
        .iter()
        .map(|&t| memory_footprint(1, t).formula_ratio)
        .collect();
    check(
        seq.windows(2).all(|w| w[1] < w[0]),
        format!("ratio not decreasing: {seq:?}"),
    )?;
    check(
        (seq[4] - 0.5).abs() < 1e-3,
        format!("ratio at T=4096 is {:.5}", seq[4]),
    )?;
    check(at64.n_v == 2 * 64, "n_v convention")?;
    Ok(format!(
        "formula ratio {:.4} at T=64 ({:.5} at T=4096); dense-entry ratio {:.3}, with full K {:.3}; n_v = 2 n_u T",
        at64.formula_ratio, seq[4], at64.dense_ratio, at64.full_k_ratio
    ))
}

/// `x⁺ = A x + B u` written out against the config matrices.
fn plant_step(model: &ModelConfig, x: &[f64], u: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += model.a_matrix[i][j] * xj;
            }
            for (j, uj) in u.iter().enumerate() {
                acc += model.b_matrix[i][j] * uj;
            }
            acc
        })
        .collect()
}

fn closed_loop() -> Outcome {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/aircraft_placeholder.json");
    let model = ModelConfig::from_path(&path).map_err(|e| e.to_string())?;
    let steps = 1000;
    let fgm = closed_loop_simulate(&model, SolverChoice::fgm_default(), 8, steps, 11)
        .map_err(|e| e.to_string())?;
    let admm = closed_loop_simulate(&model, SolverChoice::admm_default(), 8, steps, 11)
        .map_err(|e| e.to_string())?;
    let mut worst_margin = f64::INFINITY;
    let mut worst_gap = 0.0f64;
    for trace in [&fgm, &admm] {
        check(trace.records.len() == steps, "step count")?;
        let mut u_prev = vec![0.0; model.a.len()];
        let states: Vec<&[f64]> = trace.states().collect();
        for (k, rec) in trace.records.iter().enumerate() {
            for c in 0..rec.u.len() {
                let amp = model.a[c] - rec.u[c].abs();
                let rate = model.r[c] - (rec.u[c] - u_prev[c]).abs();
                worst_margin = worst_margin.min(amp).min(rate);
                check(
                    amp >= -1e-6 && rate >= -1e-6,
                    format!(
                        "{} step {k} channel {c}: margins {amp:.2e}, {rate:.2e}",
                        trace.solver
                    ),
                )?;
            }
            worst_margin = worst_margin.min(rec.amplitude_margin).min(rec.rate_margin);
            let next = plant_step(&model, states[k], &rec.u);
            let residual = max_abs(&next, states[k + 1]);
            check(
                next.iter()
                    .zip(states[k + 1])
                    .all(|(a, b)| a.to_bits() == b.to_bits()),
                format!(
                    "{} step {k}: state recursion residual {residual:e}",
                    trace.solver
                ),
            )?;
            u_prev.clone_from(&rec.u);
        }
    }
    check(worst_margin >= -1e-6, format!("margin {worst_margin:.2e}"))?;
    for (f, a) in fgm.records.iter().zip(&admm.records) {
        let gap = max_abs(&f.u, &a.u);
        worst_gap = worst_gap.max(gap);
        check(
            gap <= 1e-3,
            format!("step {}: FGM and ADMM inputs differ by {gap:.2e}", f.step),
        )?;
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!(
        "{steps} steps at T=8, min margin {worst_margin:.1e}, max input gap {worst_gap:.1e}, exact recursion, {t:.2?}"
    ))
}

fn goldens() -> Outcome {
    let sys = LinearSystem::new(
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 1.0),
        1.0,
    )
    .map_err(|e| e.to_string())?;
    let one = DMatrix::from_element(1, 1, 1.0);
    let p = solve_dare(&sys, &one, &one).map_err(|e| e.to_string())?[(0, 0)];
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    check((p - golden).abs() <= 1e-9, format!("DARE {p} vs {golden}"))?;
    let beta = fgm_step_size(1.0, 4.0).map_err(|e| e.to_string())?;
    check(beta == 1.0 / 3.0, format!("beta(1, 4) = {beta}"))?;
    let b = PairBounds::first(1.0, 1.0, 0.0);
    for (pt, want) in [([2.0, 2.0], [1.0, 1.0]), ([-2.0, 2.0], [-0.5, 0.5])] {
        let got = project_pair(pt, &b);
        let (oracle, _) = active_set_project_polyhedron(&pt, &Polyhedron::from_pair(&b))
            .map_err(|e| e.to_string())?;
        check(
            max_abs(&got, &want) <= 1e-10,
            format!("project_pair({pt:?}) = {got:?}"),
        )?;
        check(
            max_abs(&oracle, &want) <= 1e-10,
            format!("oracle disagrees with golden at {pt:?}: {oracle:?}"),
        )?;
    }
    Ok(format!(
        "DARE {p:.12}, beta(1,4) = 1/3, pair goldens confirmed by the active-set oracle"
    ))
}

fn oracle_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let tight = DykstraConfig {
        max_sweeps: 5000,
        tolerance: 1e-13,
        check_stride: 10,
    };
    let (mut dp_as, mut dp_dyk, mut dyk_as, mut grid_as) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut branch_checks = 0;
    for case in 0..200 {
        let stages = 2 + case % 7;
        let r = rng.random_range(0.05..2.0);
        let u_prev = rng.random_range(-1.0..1.0);
        let point: Vec<f64> = (0..stages).map(|_| 3.0 * gaussian(&mut rng)).collect();
        let dp = dp_rate_project(&point, r, u_prev).map_err(|e| e.to_string())?;
        check(
            dp.branches == 3usize.pow((stages - 1) as u32),
            format!("{} branches for N+1={stages}", dp.branches),
        )?;
        branch_checks += 1;

        // Rate-only rows of the lifted constraints.
        let set = RateAmpSet::scalar(1e6, r, u_prev, stages).map_err(|e| e.to_string())?;
        let poly = Polyhedron::from_lifted(&build_lifted(&set))
            .select_rows(&(stages..2 * stages).collect::<Vec<_>>());
        let (exact, cert) =
            active_set_project_polyhedron(&point, &poly).map_err(|e| e.to_string())?;
        check(
            cert.is_valid(1e-9),
            format!("rate-only certificate rejected in case {case}"),
        )?;
        dp_as = dp_as.max(max_abs(&dp.point, &exact));
        let (dyk, _) = dykstra_project(&point, &set, &tight).map_err(|e| e.to_string())?;
        dp_dyk = dp_dyk.max(max_abs(&dp.point, &dyk));

        // Full rate and amplitude set.
        let a = rng.random_range(0.5..2.0);
        let set = RateAmpSet::scalar(a, r.min(2.0 * a), u_prev.clamp(-a, a), stages)
            .map_err(|e| e.to_string())?;
        let (exact, cert) =
            active_set_project(&point, &build_lifted(&set)).map_err(|e| e.to_string())?;
        check(
            cert.is_valid(1e-9),
            format!("certificate rejected in case {case}"),
        )?;
        let (dyk, _) = dykstra_project(&point, &set, &tight).map_err(|e| e.to_string())?;
        dyk_as = dyk_as.max(l2(&dyk, &exact));

        let b = set.pair_bounds(0, case % 2 == 0);
        let pt = [point[0], point[1]];
        let (exact, _) = active_set_project_polyhedron(&pt, &Polyhedron::from_pair(&b))
            .map_err(|e| e.to_string())?;
        grid_as = grid_as.max(max_abs(&grid_project_2d(pt, &b), &exact));
    }
    let full = dp_rate_project(&[0.0; 12], 1.0, 0.0).map_err(|e| e.to_string())?;
    check(
        full.branches == 177_147,
        format!("{} branches at N+1=12", full.branches),
    )?;
    check(dp_as <= 1e-10, format!("dp vs active set {dp_as:.2e}"))?;
    check(dp_dyk <= 1e-6, format!("dp vs Dykstra {dp_dyk:.2e}"))?;
    check(
        dyk_as <= 1e-6,
        format!("Dykstra vs active set {dyk_as:.2e}"),
    )?;
    check(grid_as <= 1e-6, format!("grid vs active set {grid_as:.2e}"))?;
    Ok(format!(
        "dp~active-set {dp_as:.1e}, dp~Dykstra {dp_dyk:.1e}, Dykstra~active-set {dyk_as:.1e}, grid~active-set {grid_as:.1e}, \
         {} branch counts = 3^N",
        branch_checks + 1
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("2-D projection exactness", pair_exactness),
        ("Dykstra correctness", dykstra_correctness),
        ("solver agreement", solver_agreement),
        ("timing direction", timing_direction),
        ("memory accounting", memory_accounting),
        ("closed-loop feasibility and consistency", closed_loop),
        ("unit-level golden values", goldens),
        ("oracle cross-validation", oracle_cross_validation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
