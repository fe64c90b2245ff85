//! Browser bindings: the pair projection and its polygon, Dykstra traces and
//! FGM vs ADMM convergence on a random problem.

use rateamp_core::{classify_region, pair_bounds, project_pair, PairBounds, RateAmpSet, Region};
use rateamp_harness::{dykstra_trace, solver_traces, BenchmarkSpec};
use wasm_bindgen::prelude::*;

fn bounds(a: f64, r: f64, u_prev: f64, first: bool) -> Result<PairBounds, JsError> {
    let set = RateAmpSet::scalar(a, r, u_prev, 2).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(pair_bounds(&set, 0, first))
}

/// Projection of `(x, y)` followed by the region index `0..8` (A1, A2, B1, B2, C1..C4).
#[wasm_bindgen]
pub fn pair_project(
    a: f64,
    r: f64,
    u_prev: f64,
    first: bool,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, JsError> {
    let b = bounds(a, r, u_prev, first)?;
    let region = classify_region([x, y], &b);
    let [px, py] = project_pair([x, y], &b);
    let index = Region::ALL.iter().position(|&q| q == region).unwrap_or(0);
    Ok(vec![px, py, index as f64])
}

#[wasm_bindgen]
pub fn region_name(index: usize) -> String {
    Region::ALL
        .get(index)
        .map(|r| r.name())
        .unwrap_or("?")
        .to_string()
}

/// Vertices `[x0, y0, x1, y1, …]` of the pair set, counter-clockwise: the
/// box clipped by the two rate half-planes.
#[wasm_bindgen]
pub fn pair_polygon(a: f64, r: f64, u_prev: f64, first: bool) -> Result<Vec<f64>, JsError> {
    let b = bounds(a, r, u_prev, first)?;
    let mut poly = vec![
        [b.a0_min, b.a1_min],
        [b.a0_max, b.a1_min],
        [b.a0_max, b.a1_max],
        [b.a0_min, b.a1_max],
    ];
    // u1 − u0 ≤ r and u0 − u1 ≤ r
    for (sx, sy) in [(-1.0, 1.0), (1.0, -1.0)] {
        poly = clip(&poly, |p| sx * p[0] + sy * p[1] - b.rate);
    }
    Ok(poly.into_iter().flatten().collect())
}

/// Keeps the part of a convex polygon where `f ≤ 0`, `f` affine.
fn clip(poly: &[[f64; 2]], f: impl Fn([f64; 2]) -> f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (f(p), f(q));
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Mean distance to the exact projection after each sweep, unit set.
#[wasm_bindgen]
pub fn dykstra_curve(
    horizon: usize,
    start_std: f64,
    starts: usize,
    sweeps: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    dykstra_trace(horizon, start_std, starts, sweeps, seed)
        .map(|t| t.mean)
        .map_err(|e| JsError::new(&e.to_string()))
}

/// Mean `‖u_i − u*‖₂` per iteration: the first `iterations` entries for FGM,
/// the next `iterations` for ADMM.
#[wasm_bindgen]
pub fn solver_curves(
    horizon: usize,
    iterations: usize,
    instances: usize,
    rho: f64,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let mut spec = BenchmarkSpec::convergence_default();
    spec.horizons = vec![horizon];
    spec.instances = instances;
    spec.seed = seed;
    spec.fgm.max_iter = iterations;
    spec.admm.max_iter = iterations;
    spec.admm.rho = rho;
    spec.validate().map_err(|e| JsError::new(&e.to_string()))?;
    let tr = solver_traces(&spec, horizon).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(tr.fgm_mean.into_iter().chain(tr.admm_mean).collect())
}
