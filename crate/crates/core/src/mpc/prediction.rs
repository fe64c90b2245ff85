use nalgebra::{DMatrix, DVector};

use super::LinearSystem;
use crate::{Error, Result};

/// Stacked maps with `x = (x_1, …, x_T) = G u + H x0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionMatrices {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub nx: usize,
    pub nu: usize,
    pub horizon: usize,
}

impl PredictionMatrices {
    pub fn predict(&self, u: &DVector<f64>, x0: &DVector<f64>) -> DVector<f64> {
        &self.g * u + &self.h * x0
    }
}

pub fn build_prediction(sys: &LinearSystem, horizon: usize) -> Result<PredictionMatrices> {
    if horizon == 0 {
        return Err(Error::invalid("T", "horizon must be >= 1"));
    }
    let (nx, nu) = (sys.nx(), sys.nu());

    // powers[k] = A^k for k = 0..=T
    let mut powers = Vec::with_capacity(horizon + 1);
    powers.push(DMatrix::<f64>::identity(nx, nx));
    for k in 0..horizon {
        let next = sys.a() * &powers[k];
        powers.push(next);
    }

    let mut g = DMatrix::zeros(nx * horizon, nu * horizon);
    let mut h = DMatrix::zeros(nx * horizon, nx);
    for i in 0..horizon {
        h.view_mut((i * nx, 0), (nx, nx)).copy_from(&powers[i + 1]);
        for j in 0..=i {
            let block = &powers[i - j] * sys.b();
            g.view_mut((i * nx, j * nu), (nx, nu)).copy_from(&block);
        }
    }
    Ok(PredictionMatrices {
        g,
        h,
        nx,
        nu,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn scalar(a: f64, b: f64) -> LinearSystem {
        LinearSystem::new(dmatrix![a], dmatrix![b], 1.0).unwrap()
    }

    #[test]
    fn zero_dynamics_give_identity_blocks() {
        let p = build_prediction(&scalar(0.0, 1.0), 2).unwrap();
        assert_eq!(p.g, dmatrix![1.0, 0.0; 0.0, 1.0]);
        assert_eq!(p.h, dmatrix![0.0; 0.0]);
    }

    #[test]
    fn unit_integrator() {
        let p = build_prediction(&scalar(1.0, 1.0), 2).unwrap();
        assert_eq!(p.g, dmatrix![1.0, 0.0; 1.0, 1.0]);
        assert_eq!(p.h, dmatrix![1.0; 1.0]);
    }

    #[test]
    fn zero_horizon_rejected() {
        assert!(build_prediction(&scalar(1.0, 1.0), 0).is_err());
    }

    #[test]
    fn matches_forward_simulation() {
        let a = dmatrix![0.5, 0.1, -0.2; 0.0, 0.7, 0.3; 0.2, -0.1, 0.4];
        let b = dmatrix![1.0, 0.0; 0.5, -1.0; 0.0, 2.0];
        let sys = LinearSystem::new(a, b, 0.1).unwrap();
        let t = 8;
        let p = build_prediction(&sys, t).unwrap();
        let u = DVector::from_fn(2 * t, |i, _| ((i as f64) * 0.37).sin());
        let x0 = DVector::from_vec(vec![1.0, -2.0, 0.5]);

        let stacked = p.predict(&u, &x0);
        let mut x = x0.as_slice().to_vec();
        for k in 0..t {
            x = sys.step(&x, &u.as_slice()[2 * k..2 * k + 2]);
            for i in 0..3 {
                assert!((stacked[3 * k + i] - x[i]).abs() <= 1e-12);
            }
        }
        // causality: blocks above the diagonal vanish
        for i in 0..t {
            for j in (i + 1)..t {
                assert!(p.g.view((3 * i, 2 * j), (3, 2)).iter().all(|v| *v == 0.0));
            }
        }
    }
}
