use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rateamp_core::{CondensedQp, RateAmpSet};

use crate::error::{HarnessError, Result};

/// A random condensed QP with `q = x0` and its constraint set.
#[derive(Clone, Debug)]
pub struct RandomProblem {
    pub qp: CondensedQp,
    pub set: RateAmpSet,
    /// `x0 ~ N(0, x0_std² I)`; the linear map is the identity.
    pub x0_std: f64,
    pub seed: u64,
}

impl RandomProblem {
    /// Draws the `index`-th initial condition from a stream independent of the matrix data.
    pub fn draw_x0(&self, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1 + index);
        (0..self.qp.dim())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                self.x0_std * z
            })
            .collect()
    }
}

/// `J = W Λ Wᵀ` with `W` the orthogonal factor of a Gaussian matrix and
/// `Λ` log-uniform on `[1, cond_target]`; `a = r = 1`, `u_{−1} = 0`.
pub fn gen_random_problem(
    t: usize,
    n_u: usize,
    seed: u64,
    cond_target: f64,
    x0_std: f64,
) -> Result<RandomProblem> {
    if !(cond_target >= 1.0) {
        return Err(HarnessError::Config {
            field: "cond_target",
            reason: format!("{cond_target} < 1"),
        });
    }
    let n = t * n_u;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let w = g.qr().q();
    let log_c = cond_target.ln();
    let lambda = if cond_target == 1.0 {
        DVector::from_element(n, 1.0)
    } else {
        DVector::from_fn(n, |_, _| (rng.random::<f64>() * log_c).exp())
    };
    let mut j = &w * DMatrix::from_diagonal(&lambda) * w.transpose();
    let sym = (&j + j.transpose()) * 0.5;
    j.copy_from(&sym);
    let qp = CondensedQp::from_hessian(j, DMatrix::identity(n, n), n_u, t)?;
    let set = RateAmpSet::new(vec![1.0; n_u], vec![1.0; n_u], vec![0.0; n_u], t)?;
    Ok(RandomProblem {
        qp,
        set,
        x0_std,
        seed,
    })
}
