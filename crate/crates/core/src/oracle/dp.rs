use crate::{Error, Result};

/// Largest stage count `N + 1` accepted by [`dp_rate_project`].
pub const STAGE_GUARD: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct DpProjection {
    pub point: Vec<f64>,
    /// Number of saturation patterns enumerated, `3^N`.
    pub branches: usize,
    pub cost: f64,
}

/// Exact projection onto the rate-only set
/// `{ z : |z_0 − u_prev| ≤ r, |z_k − z_{k−1}| ≤ r }` of a scalar input sequence.
///
/// The cost-to-go recursion saturates every inner slope `z_k − z_{k−1}` at
/// `−r`, `+r` or leaves it free. Each of the `3^N` patterns splits `z` into
/// runs linked by saturated slopes; a run's level is the mean of its shifted
/// targets, and the first run's level is also limited to
/// `[u_prev − r, u_prev + r]`. The cheapest pattern whose free slopes are
/// feasible is the projection.
pub fn dp_rate_project(point: &[f64], r: f64, u_prev: f64) -> Result<DpProjection> {
    let stages = point.len();
    if stages == 0 {
        return Err(Error::invalid("point", "must not be empty"));
    }
    if stages > STAGE_GUARD {
        return Err(Error::OracleGuard {
            rows: stages,
            limit: STAGE_GUARD,
        });
    }
    if !(r > 0.0) {
        return Err(Error::invalid("r", "must be positive"));
    }
    let n = stages - 1;
    let branches = 3usize.pow(n as u32);
    let tol = 1e-12 * r.max(1.0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut z = vec![0.0; stages];
    let mut offset = vec![0.0; stages];
    let mut digits = vec![0u8; n];

    for code in 0..branches {
        let mut c = code;
        for d in digits.iter_mut() {
            *d = (c % 3) as u8;
            c /= 3;
        }
        // Offsets within each run; a free slope starts a new run.
        let mut start = 0;
        offset[0] = 0.0;
        let mut runs = Vec::new();
        for k in 1..stages {
            match digits[k - 1] {
                0 => {
                    runs.push((start, k));
                    start = k;
                    offset[k] = 0.0;
                }
                1 => offset[k] = offset[k - 1] - r,
                _ => offset[k] = offset[k - 1] + r,
            }
        }
        runs.push((start, stages));
        for (idx, &(s, e)) in runs.iter().enumerate() {
            let mut level = (s..e).map(|k| point[k] - offset[k]).sum::<f64>() / (e - s) as f64;
            if idx == 0 {
                level = level.clamp(u_prev - r, u_prev + r);
            }
            for k in s..e {
                z[k] = level + offset[k];
            }
        }
        let feasible =
            (1..stages).all(|k| digits[k - 1] != 0 || (z[k] - z[k - 1]).abs() <= r + tol);
        if !feasible {
            continue;
        }
        let cost: f64 = z.iter().zip(point).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(bc, _)| cost < *bc) {
            best = Some((cost, z.clone()));
        }
    }
    let (cost, point) = best.ok_or(Error::Infeasible)?;
    Ok(DpProjection {
        point,
        branches,
        cost,
    })
}
