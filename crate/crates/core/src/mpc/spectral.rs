use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Extreme eigenvalues of a symmetric positive definite Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct PowerIterationOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

pub fn spectral_bounds(j: &DMatrix<f64>) -> Result<SpectralBounds> {
    spectral_bounds_with(j, &PowerIterationOptions::default())
}

/// `λmax` by power iteration on `J`, then `λmin = λmax − μ` where `μ` is the
/// dominant eigenvalue of the shifted matrix `λmax·I − J`.
pub fn spectral_bounds_with(
    j: &DMatrix<f64>,
    opts: &PowerIterationOptions,
) -> Result<SpectralBounds> {
    if !j.is_square() || j.nrows() == 0 {
        return Err(Error::dim("J columns", j.nrows(), j.ncols()));
    }
    let n = j.nrows();
    let lambda_max = power_iteration(j, opts, 0.0)?;
    if lambda_max <= 0.0 {
        return Err(Error::NotStronglyConvex(lambda_max));
    }
    // The shifted spectrum can sit at roundoff level (J ≈ cI), so its
    // tolerance is measured against λmax.
    let shifted = DMatrix::<f64>::identity(n, n) * lambda_max - j;
    let shift = power_iteration(&shifted, opts, lambda_max)?;
    // A spread below roundoff of the shifted product is indistinguishable from zero.
    let floor = 4.0 * n as f64 * f64::EPSILON * lambda_max;
    let shift = if shift <= floor { 0.0 } else { shift };
    Ok(SpectralBounds {
        lambda_min: lambda_max - shift,
        lambda_max,
    })
}

/// Dominant eigenvalue of a symmetric `b` by power iteration with repeated
/// squaring: each round applies the current power `b^(2^s)` to the vector and
/// then squares it, so clusters that a fixed power cannot separate in any
/// reasonable number of products are resolved after a few dozen rounds.
/// Stops when `‖b v − θ v‖ ≤ rel_tol · max(|θ|, scale)` for `θ = vᵀ b v`.
fn power_iteration(b: &DMatrix<f64>, opts: &PowerIterationOptions, scale: f64) -> Result<f64> {
    let n = b.nrows();
    let size = b.norm();
    if size == 0.0 {
        return Ok(0.0);
    }
    // Deterministic start with no symmetry that could hide an eigenvector.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin());
    v.normalize_mut();
    let mut power = b / size;
    let mut w = DVector::zeros(n);
    for _ in 0..opts.max_iter {
        w.gemv(1.0, b, &v, 0.0);
        let theta = v.dot(&w);
        let residual = (&w - &v * theta).norm();
        if residual <= opts.rel_tol * theta.abs().max(scale) {
            return Ok(theta);
        }
        w.gemv(1.0, &power, &v, 0.0);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(theta);
        }
        v.copy_from(&(&w / norm));
        let squared = &power * &power;
        let sym = (&squared + squared.transpose()) * 0.5;
        let top = sym.norm();
        if top == 0.0 {
            return Ok(theta);
        }
        power = sym / top;
    }
    Err(Error::PowerIteration(opts.max_iter))
}

/// Checks `λmax·I − J ⪰ 0` and `J − λmin·I ⪰ 0` by attempting Cholesky
/// factorizations with a shift of `1e-8·max(1, λmax)`.
pub fn verify_spectral_sandwich(j: &DMatrix<f64>, bounds: &SpectralBounds) -> bool {
    let n = j.nrows();
    let slack = 1e-8 * bounds.lambda_max.max(1.0);
    let eye = DMatrix::<f64>::identity(n, n);
    let upper = &eye * (bounds.lambda_max + slack) - j;
    let lower = j - &eye * (bounds.lambda_min - slack);
    upper.cholesky().is_some() && lower.cholesky().is_some()
}

/// Constant momentum `β = (√λmax − √λmin)/(√λmax + √λmin)`.
pub fn fgm_step_size(lambda_min: f64, lambda_max: f64) -> Result<f64> {
    if !(lambda_min > 0.0) {
        return Err(Error::NotStronglyConvex(lambda_min));
    }
    if lambda_min > lambda_max {
        return Err(Error::invalid(
            "lambda_min",
            format!("{lambda_min} exceeds lambda_max {lambda_max}"),
        ));
    }
    let (lo, hi) = (lambda_min.sqrt(), lambda_max.sqrt());
    Ok((hi - lo) / (hi + lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    /// Eigenvalue bracketing via sign changes of det(J − λI), then bisection.
    fn charpoly_extremes(j: &DMatrix<f64>) -> (f64, f64) {
        let n = j.nrows();
        let det = |l: f64| (j - DMatrix::<f64>::identity(n, n) * l).determinant();
        let top = j
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
            * 1.01;
        let samples = 40_000;
        let mut roots = Vec::new();
        let mut prev_l = 0.0;
        let mut prev_d = det(0.0);
        for k in 1..=samples {
            let l = top * k as f64 / samples as f64;
            let d = det(l);
            if d == 0.0 || d.signum() != prev_d.signum() {
                let (mut lo, mut hi) = (prev_l, l);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if det(mid).signum() == prev_d.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_l = l;
            prev_d = d;
        }
        (roots[0], *roots.last().unwrap())
    }

    fn random_pd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = DMatrix::from_fn(n, n, |_, _| next());
        m.transpose() * &m + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn identity_and_diagonal() {
        let b = spectral_bounds(&DMatrix::identity(2, 2)).unwrap();
        assert!((b.lambda_min - 1.0).abs() < 1e-14 && (b.lambda_max - 1.0).abs() < 1e-14);
        let b = spectral_bounds(&dmatrix![1.0, 0.0; 0.0, 4.0]).unwrap();
        assert!((b.lambda_min - 1.0).abs() < 1e-9 && (b.lambda_max - 4.0).abs() < 1e-9);
    }

    #[test]
    fn random_pd_against_characteristic_polynomial() {
        for (seed, n) in [(1u64, 3usize), (2, 5), (3, 8), (4, 6), (5, 8)] {
            let j = random_pd(n, seed);
            let (lo, hi) = charpoly_extremes(&j);
            let b = spectral_bounds(&j).unwrap();
            assert!(
                (b.lambda_max - hi).abs() <= 1e-8 * hi.max(1.0),
                "max {} vs {}",
                b.lambda_max,
                hi
            );
            assert!(
                (b.lambda_min - lo).abs() <= 1e-8 * hi.max(1.0),
                "min {} vs {}",
                b.lambda_min,
                lo
            );
            assert!(verify_spectral_sandwich(&j, &b));
        }
    }

    #[test]
    fn nearly_repeated_top_eigenvalue() {
        let j = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 50.0, 100.0 - 1e-7, 100.0]));
        let b = spectral_bounds(&j).unwrap();
        assert!(
            (b.lambda_max - 100.0).abs() <= 1e-8 * 100.0,
            "{}",
            b.lambda_max
        );
        assert!(
            (b.lambda_min - 1.0).abs() <= 1e-8 * 100.0,
            "{}",
            b.lambda_min
        );
        assert!(verify_spectral_sandwich(&j, &b));
    }

    #[test]
    fn tight_cluster_below_top() {
        // J ≈ I with a narrow cluster at the bottom, as for short sampling times
        let mut d = vec![1.0 + 1e-2, 1.0 + 1.6e-3, 1.0 + 6e-4];
        d.extend((0..20).map(|i| 1.0 + 1e-10 * i as f64));
        let j = DMatrix::from_diagonal(&DVector::from_vec(d));
        let b = spectral_bounds(&j).unwrap();
        assert!((b.lambda_max - 1.01).abs() <= 1e-10, "{}", b.lambda_max);
        assert!((b.lambda_min - 1.0).abs() <= 1e-8, "{}", b.lambda_min);
        assert!(verify_spectral_sandwich(&j, &b));
    }

    #[test]
    fn sandwich_rejects_wrong_bounds() {
        let j = dmatrix![1.0, 0.0; 0.0, 4.0];
        let bad = SpectralBounds {
            lambda_min: 1.5,
            lambda_max: 4.0,
        };
        assert!(!verify_spectral_sandwich(&j, &bad));
    }

    #[test]
    fn step_size_values() {
        assert_eq!(fgm_step_size(5.0, 5.0).unwrap(), 0.0);
        assert_eq!(fgm_step_size(1.0, 4.0).unwrap(), 1.0 / 3.0);
        assert_eq!(fgm_step_size(1.0, 100.0).unwrap(), 9.0 / 11.0);
        assert!(fgm_step_size(0.0, 1.0).is_err());
        assert!(fgm_step_size(-1.0, 1.0).is_err());
    }
}
