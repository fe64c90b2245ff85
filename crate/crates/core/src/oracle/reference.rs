use nalgebra::{DMatrix, DVector};

use super::active_set::{
    active_set_project_polyhedron, dual_active_set_project, ActiveSetCertificate, Polyhedron, Side,
    ROW_GUARD,
};
use crate::mpc::CondensedQp;
use crate::projection::RateAmpSet;
use crate::solvers::build_lifted;
use crate::{Error, Result};

const KKT_TARGET: f64 = 1e-8;
const ADMM_TOL: f64 = 1e-10;
const ADMM_MAX_ITER: usize = 1_000_000;
const POLISH_ROUNDS: usize = 200;
const POLISH_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceMethod {
    /// Exact projection in the metric of `J`.
    ActiveSet,
    /// Tight ADMM followed by an equality solve on its active set.
    PolishedAdmm,
    /// Tight ADMM, polishing rejected.
    Admm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSolution {
    pub u: Vec<f64>,
    /// Multipliers of `v_lo ≤ K u ≤ v_hi`, positive at upper bounds.
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
    pub method: ReferenceMethod,
}

/// High-accuracy minimizer of `½uᵀJu + q(x0)ᵀu` over the rate/amplitude set.
///
/// Small instances map to a least-distance problem with `z = Lᵀu`
/// (`J = LLᵀ`) and project `−L⁻¹q` exactly. Larger ones run a separate,
/// tightly converged ADMM and polish its active set, falling back to the dual
/// active-set method when the polish misses. The result is accepted
/// only if its KKT residual in the lifted form is at most `1e-8`.
pub fn reference_solve(
    qp: &CondensedQp,
    x0: &[f64],
    set: &RateAmpSet,
) -> Result<ReferenceSolution> {
    let n = qp.dim();
    if set.dim() != n {
        return Err(Error::dim("constraint set", n, set.dim()));
    }
    if x0.len() != qp.nx() {
        return Err(Error::dim("x0", qp.nx(), x0.len()));
    }
    let q = qp.linear_term(x0);
    let lifted = build_lifted(set);
    let (k, lo, hi) = (&lifted.k, &lifted.v_lo, &lifted.v_hi);

    if k.nrows() <= ROW_GUARD {
        if let Some(sol) = via_active_set(&qp.j, &q, k, lo, hi, active_set_project_polyhedron)? {
            return Ok(sol);
        }
    }

    let (u, gamma, primal, dual) = tight_admm(&qp.j, &q, k, lo, hi)?;
    let admm_kkt = kkt_residual(&qp.j, &q, k, lo, hi, &u, &gamma);
    let mut best = ReferenceSolution {
        u: u.as_slice().to_vec(),
        multipliers: gamma.as_slice().to_vec(),
        kkt_residual: admm_kkt,
        method: ReferenceMethod::Admm,
    };
    if let Some((pu, pl)) = polish(&qp.j, &q, k, lo, hi, &gamma) {
        let kkt = kkt_residual(&qp.j, &q, k, lo, hi, &pu, &pl);
        if kkt < best.kkt_residual {
            best = ReferenceSolution {
                u: pu.as_slice().to_vec(),
                multipliers: pl.as_slice().to_vec(),
                kkt_residual: kkt,
                method: ReferenceMethod::PolishedAdmm,
            };
        }
    }
    if best.kkt_residual > KKT_TARGET && k.nrows() > ROW_GUARD {
        if let Some(sol) = via_active_set(&qp.j, &q, k, lo, hi, dual_active_set_project)? {
            return Ok(sol);
        }
    }
    if best.kkt_residual > KKT_TARGET {
        return Err(Error::ReferenceUnmet {
            kkt: best.kkt_residual,
            primal,
            dual,
        });
    }
    Ok(best)
}

fn via_active_set(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    project: fn(&[f64], &Polyhedron) -> Result<(Vec<f64>, ActiveSetCertificate)>,
) -> Result<Option<ReferenceSolution>> {
    let chol = j
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("J"))?;
    let l = chol.l();
    let target = l
        .solve_lower_triangular(&(-q))
        .ok_or(Error::Factorization("J"))?;
    // C = K L⁻ᵀ, i.e. Cᵀ = L⁻¹ Kᵀ.
    let ct = l
        .solve_lower_triangular(&k.transpose())
        .ok_or(Error::Factorization("J"))?;
    let poly = Polyhedron::new(ct.transpose(), lo.clone(), hi.clone())?;
    let (z, cert) = project(target.as_slice(), &poly)?;
    let u = l
        .transpose()
        .solve_upper_triangular(&DVector::from_vec(z))
        .ok_or(Error::Factorization("J"))?;
    let mut lambda = DVector::zeros(k.nrows());
    for (&(row, side), &mu) in cert.active.iter().zip(&cert.multipliers) {
        lambda[row] += match side {
            Side::Upper => mu,
            Side::Lower => -mu,
        };
    }
    let kkt = kkt_residual(j, q, k, lo, hi, &u, &lambda);
    Ok((kkt <= KKT_TARGET).then(|| ReferenceSolution {
        u: u.as_slice().to_vec(),
        multipliers: lambda.as_slice().to_vec(),
        kkt_residual: kkt,
        method: ReferenceMethod::ActiveSet,
    }))
}

/// KKT residual of `(u, λ)` for `min ½uᵀJu + qᵀu s.t. lo ≤ Ku ≤ hi`:
/// the largest of stationarity `‖Ju + q + Kᵀλ‖∞`, bound violation, the
/// sign error of `λ` and complementarity `|λ_i|·slack_i`.
pub fn kkt_residual(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    u: &DVector<f64>,
    lambda: &DVector<f64>,
) -> f64 {
    let stationarity = (j * u + q + k.transpose() * lambda).amax();
    let ku = k * u;
    let mut worst = stationarity;
    for i in 0..ku.len() {
        let viol = (lo[i] - ku[i]).max(ku[i] - hi[i]).max(0.0);
        let comp = if lambda[i] > 0.0 {
            lambda[i] * (hi[i] - ku[i]).abs()
        } else {
            -lambda[i] * (ku[i] - lo[i]).abs()
        };
        worst = worst.max(viol).max(comp);
    }
    worst
}

struct AdmmRun {
    u: DVector<f64>,
    gamma: DVector<f64>,
    primal: f64,
    dual: f64,
}

fn admm_run(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    rho: f64,
    iters: usize,
    tol: f64,
) -> Result<AdmmRun> {
    let system = j + k.transpose() * k * rho;
    let chol = system
        .cholesky()
        .ok_or(Error::Factorization("reference ADMM system"))?;
    let m = k.nrows();
    let mut u = DVector::zeros(j.nrows());
    let mut v = DVector::<f64>::zeros(m);
    let mut gamma = DVector::<f64>::zeros(m);
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    for it in 1..=iters {
        let rhs = k.transpose() * (&v * rho - &gamma) - q;
        u = chol.solve(&rhs);
        let ku = k * &u;
        let v_new = DVector::from_iterator(
            m,
            (0..m).map(|i| (ku[i] + gamma[i] / rho).clamp(lo[i], hi[i])),
        );
        let r = &ku - &v_new;
        gamma += &r * rho;
        primal = r.amax();
        dual = (k.transpose() * (&v_new - &v)).amax() * rho;
        v = v_new;
        if !primal.is_finite() {
            return Err(Error::NonFinite(it));
        }
        if primal <= tol && dual <= tol {
            break;
        }
    }
    Ok(AdmmRun {
        u,
        gamma,
        primal,
        dual,
    })
}

/// Picks `ρ` by bisection in log space so that short runs balance the primal
/// and dual residuals, then runs to `1e-10`.
fn tight_admm(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>, f64, f64)> {
    let (mut a, mut b) = ((1e-4f64).ln(), (1e4f64).ln());
    for _ in 0..20 {
        let mid = 0.5 * (a + b);
        let run = admm_run(j, q, k, lo, hi, mid.exp(), 100, 0.0)?;
        if run.primal > run.dual {
            a = mid;
        } else {
            b = mid;
        }
    }
    let rho = (0.5 * (a + b)).exp();
    let run = admm_run(j, q, k, lo, hi, rho, ADMM_MAX_ITER, ADMM_TOL)?;
    Ok((run.u, run.gamma, run.primal, run.dual))
}

/// Solves the equality-constrained QP on the rows ADMM reports as active,
/// then corrects the guess one row at a time: the most violated inactive row
/// is added, otherwise the active row with the worst multiplier sign is
/// dropped. Returns the iterate with the smallest KKT residual.
fn polish(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    gamma: &DVector<f64>,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let thresh = 1e-7 * (1.0 + gamma.amax());
    let mut active: Vec<(usize, bool)> = (0..k.nrows())
        .filter_map(|i| {
            if gamma[i] > thresh {
                Some((i, true))
            } else if gamma[i] < -thresh {
                Some((i, false))
            } else {
                None
            }
        })
        .collect();
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for _ in 0..POLISH_ROUNDS {
        let (pu, lambda) = equality_solve(j, q, k, lo, hi, &active)?;
        let kkt = kkt_residual(j, q, k, lo, hi, &pu, &lambda);
        if best.as_ref().is_none_or(|b| kkt < b.0) {
            best = Some((kkt, pu.clone(), lambda.clone()));
        }
        if kkt <= POLISH_FLOOR {
            break;
        }
        let ku = k * &pu;
        let violated = (0..k.nrows())
            .filter(|i| !active.iter().any(|(a, _)| a == i))
            .map(|i| (i, lo[i] - ku[i], ku[i] - hi[i]))
            .map(|(i, below, above)| {
                if above >= below {
                    (i, true, above)
                } else {
                    (i, false, below)
                }
            })
            .filter(|&(_, _, v)| v > 0.0)
            .max_by(|a, b| a.2.total_cmp(&b.2));
        if let Some((i, upper, _)) = violated {
            active.push((i, upper));
            continue;
        }
        let wrong = active
            .iter()
            .enumerate()
            .map(|(r, &(i, upper))| (r, if upper { -lambda[i] } else { lambda[i] }))
            .filter(|&(_, w)| w > 0.0)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match wrong {
            Some((r, _)) => {
                active.remove(r);
            }
            None => break,
        }
    }
    best.map(|(_, u, l)| (u, l))
}

fn equality_solve(
    j: &DMatrix<f64>,
    q: &DVector<f64>,
    k: &DMatrix<f64>,
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    active: &[(usize, bool)],
) -> Option<(DVector<f64>, DVector<f64>)> {
    let (n, m) = (j.nrows(), active.len());
    let mut kkt = DMatrix::zeros(n + m, n + m);
    kkt.view_mut((0, 0), (n, n)).copy_from(j);
    let mut rhs = DVector::zeros(n + m);
    rhs.rows_mut(0, n).copy_from(&(-q));
    for (r, &(i, upper)) in active.iter().enumerate() {
        for c in 0..n {
            kkt[(n + r, c)] = k[(i, c)];
            kkt[(c, n + r)] = k[(i, c)];
        }
        rhs[n + r] = if upper { hi[i] } else { lo[i] };
    }
    let sol = kkt.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let pu = sol.rows(0, n).into_owned();
    let mut lambda = DVector::zeros(k.nrows());
    for (r, &(i, _)) in active.iter().enumerate() {
        lambda[i] = sol[n + r];
    }
    Some((pu, lambda))
}
