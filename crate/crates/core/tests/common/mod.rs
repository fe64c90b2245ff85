#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rateamp_core::{CondensedQp, RateAmpSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, std: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            std * z
        })
        .collect()
}

/// `J = W Λ Wᵀ`, `W` orthogonal, `Λ` log-uniform on `[1, cond]`; `q` equals `x0`.
pub fn random_qp(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> CondensedQp {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let w = g.qr().q();
    let lambda = DVector::from_fn(n, |_, _| (rng.random::<f64>() * cond.ln()).exp());
    let j = &w * DMatrix::from_diagonal(&lambda) * w.transpose();
    let j = (&j + j.transpose()) * 0.5;
    CondensedQp::from_hessian(j, DMatrix::identity(n, n), 1, n).unwrap()
}

pub fn unit_set(t: usize) -> RateAmpSet {
    RateAmpSet::scalar(1.0, 1.0, 0.0, t).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
