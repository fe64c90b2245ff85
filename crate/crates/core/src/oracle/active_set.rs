use nalgebra::{DMatrix, DVector};

use crate::projection::PairBounds;
use crate::solvers::LiftedConstraints;
use crate::{Error, Result};

/// Largest row count accepted by [`active_set_project`].
pub const ROW_GUARD: usize = 16;
/// Up to this many rows every active pattern is enumerated; above it a dual
/// active-set method is used.
pub const ENUMERATION_ROWS: usize = 10;

const TOL: f64 = 1e-11;

/// `{ z : lo ≤ C z ≤ hi }`; infinite bounds are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    pub c: DMatrix<f64>,
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
}

impl Polyhedron {
    pub fn new(c: DMatrix<f64>, lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        if lo.len() != c.nrows() || hi.len() != c.nrows() {
            return Err(Error::dim(
                "polyhedron bounds",
                c.nrows(),
                lo.len().min(hi.len()),
            ));
        }
        if lo
            .iter()
            .zip(hi.iter())
            .any(|(l, h)| l > h || l.is_nan() || h.is_nan())
        {
            return Err(Error::Infeasible);
        }
        Ok(Self { c, lo, hi })
    }

    pub fn from_lifted(lifted: &LiftedConstraints) -> Self {
        Self {
            c: lifted.k.clone(),
            lo: lifted.v_lo.clone(),
            hi: lifted.v_hi.clone(),
        }
    }

    /// The pair set as three rows: both coordinates boxed, one difference.
    pub fn from_pair(b: &PairBounds) -> Self {
        Self {
            c: DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, 1.0]),
            lo: DVector::from_vec(vec![b.a0_min, b.a1_min, -b.rate]),
            hi: DVector::from_vec(vec![b.a0_max, b.a1_max, b.rate]),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            c: self.c.select_rows(rows),
            lo: self.lo.select_rows(rows),
            hi: self.hi.select_rows(rows),
        }
    }

    pub fn rows(&self) -> usize {
        self.c.nrows()
    }

    pub fn dim(&self) -> usize {
        self.c.ncols()
    }

    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let cz = &self.c * DVector::from_column_slice(z);
        (0..self.rows())
            .map(|i| (self.lo[i] - cz[i]).max(cz[i] - self.hi[i]).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActiveSetMethod {
    Enumeration,
    DualActiveSet,
}

/// KKT evidence for `z = argmin ½‖z − p‖²` over a polyhedron:
/// `z − p + Σ μ_i s_i c_i = 0`, `μ ≥ 0`, `z` feasible, active rows tight,
/// where `s_i = +1` for an upper and `−1` for a lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ActiveSetCertificate {
    pub active: Vec<(usize, Side)>,
    pub multipliers: Vec<f64>,
    pub point: Vec<f64>,
    pub method: ActiveSetMethod,
    pub stationarity: f64,
    pub primal_violation: f64,
    /// Largest `|c_iᵀz − bound|` over active rows.
    pub complementarity: f64,
    pub min_multiplier: f64,
}

impl ActiveSetCertificate {
    /// Recomputes every residual from the polyhedron, the target and the
    /// claimed active set and multipliers.
    pub fn certify(
        poly: &Polyhedron,
        target: &[f64],
        point: Vec<f64>,
        active: Vec<(usize, Side)>,
        multipliers: Vec<f64>,
        method: ActiveSetMethod,
    ) -> Self {
        let z = DVector::from_column_slice(&point);
        let mut grad = &z - DVector::from_column_slice(target);
        let cz = &poly.c * &z;
        let mut complementarity = 0.0f64;
        for (&(row, side), &mu) in active.iter().zip(&multipliers) {
            grad += poly.c.row(row).transpose() * (side.sign() * mu);
            let bound = match side {
                Side::Lower => poly.lo[row],
                Side::Upper => poly.hi[row],
            };
            complementarity = complementarity.max((cz[row] - bound).abs());
        }
        Self {
            stationarity: grad.amax(),
            primal_violation: poly.max_violation(&point),
            complementarity,
            min_multiplier: multipliers.iter().copied().fold(f64::INFINITY, f64::min),
            active,
            multipliers,
            point,
            method,
        }
    }

    /// Largest of the residuals and the negative part of the multipliers.
    pub fn worst_residual(&self) -> f64 {
        let neg = if self.min_multiplier.is_finite() {
            (-self.min_multiplier).max(0.0)
        } else {
            0.0
        };
        self.stationarity
            .max(self.primal_violation)
            .max(self.complementarity)
            .max(neg)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.worst_residual() <= tol
    }
}

/// Exact Euclidean projection onto `{u : v_lo ≤ K u ≤ v_hi}`.
pub fn active_set_project(
    point: &[f64],
    lifted: &LiftedConstraints,
) -> Result<(Vec<f64>, ActiveSetCertificate)> {
    active_set_project_polyhedron(point, &Polyhedron::from_lifted(lifted))
}

pub fn active_set_project_polyhedron(
    point: &[f64],
    poly: &Polyhedron,
) -> Result<(Vec<f64>, ActiveSetCertificate)> {
    if point.len() != poly.dim() {
        return Err(Error::dim("point", poly.dim(), point.len()));
    }
    if poly.rows() > ROW_GUARD {
        return Err(Error::OracleGuard {
            rows: poly.rows(),
            limit: ROW_GUARD,
        });
    }
    let (z, active, mu, method) = if poly.rows() <= ENUMERATION_ROWS {
        let (z, a, m) = enumerate(point, poly)?;
        (z, a, m, ActiveSetMethod::Enumeration)
    } else {
        let (z, a, m) = dual_active_set(point, poly)?;
        (z, a, m, ActiveSetMethod::DualActiveSet)
    };
    let cert = ActiveSetCertificate::certify(poly, point, z.clone(), active, mu, method);
    Ok((z, cert))
}

/// Dual active-set projection with no row guard, for callers that accept
/// the cost on large instances.
pub(crate) fn dual_active_set_project(
    point: &[f64],
    poly: &Polyhedron,
) -> Result<(Vec<f64>, ActiveSetCertificate)> {
    if point.len() != poly.dim() {
        return Err(Error::dim("point", poly.dim(), point.len()));
    }
    let (z, active, mu) = dual_active_set(point, poly)?;
    let cert = ActiveSetCertificate::certify(
        poly,
        point,
        z.clone(),
        active,
        mu,
        ActiveSetMethod::DualActiveSet,
    );
    Ok((z, cert))
}

type Solution = (Vec<f64>, Vec<(usize, Side)>, Vec<f64>);

fn scale(point: &[f64], poly: &Polyhedron) -> f64 {
    let b = poly
        .lo
        .iter()
        .chain(poly.hi.iter())
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    1.0f64
        .max(b)
        .max(point.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Tries all `3^m` patterns (free / at lower / at upper) and keeps the
/// closest point satisfying the KKT conditions.
fn enumerate(point: &[f64], poly: &Polyhedron) -> Result<Solution> {
    let (m, d) = (poly.rows(), poly.dim());
    let tol = TOL * scale(point, poly);
    let p = DVector::from_column_slice(point);
    let mut best: Option<(f64, Solution)> = None;
    let mut pattern = vec![0u8; m];
    'outer: loop {
        let active: Vec<(usize, Side)> = pattern
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| match s {
                1 => Some((i, Side::Lower)),
                2 => Some((i, Side::Upper)),
                _ => None,
            })
            .collect();
        let bounds_finite = active.iter().all(|&(i, s)| match s {
            Side::Lower => poly.lo[i].is_finite(),
            Side::Upper => poly.hi[i].is_finite(),
        });
        if active.len() <= d && bounds_finite {
            if let Some(sol) = solve_pattern(&p, poly, &active, tol) {
                let dist = sol
                    .0
                    .iter()
                    .zip(point)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>();
                if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
                    best = Some((dist, sol));
                }
            }
        }
        for s in pattern.iter_mut() {
            *s += 1;
            if *s < 3 {
                continue 'outer;
            }
            *s = 0;
        }
        break;
    }
    best.map(|(_, s)| s).ok_or(Error::Infeasible)
}

/// Least-distance point with the given rows held at their bounds, accepted
/// only if it is feasible and all multipliers have the right sign.
fn solve_pattern(
    p: &DVector<f64>,
    poly: &Polyhedron,
    active: &[(usize, Side)],
    tol: f64,
) -> Option<Solution> {
    let rows: Vec<usize> = active.iter().map(|a| a.0).collect();
    let a = poly.c.select_rows(&rows);
    let b = DVector::from_iterator(
        active.len(),
        active.iter().map(|&(i, s)| match s {
            Side::Lower => poly.lo[i],
            Side::Upper => poly.hi[i],
        }),
    );
    let (z, mu) = if active.is_empty() {
        (p.clone(), Vec::new())
    } else {
        let gram = &a * a.transpose();
        let chol = gram.cholesky()?;
        let lambda = chol.solve(&(&a * p - &b));
        let z = p - a.transpose() * &lambda;
        let mu: Vec<f64> = active
            .iter()
            .zip(lambda.iter())
            .map(|(&(_, s), &l)| s.sign() * l)
            .collect();
        (z, mu)
    };
    if mu.iter().any(|&m| m < -tol) {
        return None;
    }
    let zs = z.as_slice().to_vec();
    if poly.max_violation(&zs) > tol {
        return None;
    }
    Some((zs, active.to_vec(), mu))
}

/// Goldfarb–Idnani dual method for `min ½‖z − p‖²` under one-sided rows
/// `n_jᵀz ≥ b_j`. It starts at the unconstrained minimizer and adds the most
/// violated row at each outer step, dropping rows whose multiplier would turn
/// negative.
fn dual_active_set(point: &[f64], poly: &Polyhedron) -> Result<Solution> {
    let d = poly.dim();
    let tol = TOL * scale(point, poly);
    let mut normals: Vec<DVector<f64>> = Vec::new();
    let mut rhs = Vec::new();
    let mut origin = Vec::new();
    for i in 0..poly.rows() {
        let row = poly.c.row(i).transpose();
        if poly.lo[i].is_finite() {
            normals.push(row.clone());
            rhs.push(poly.lo[i]);
            origin.push((i, Side::Lower));
        }
        if poly.hi[i].is_finite() {
            normals.push(-row);
            rhs.push(-poly.hi[i]);
            origin.push((i, Side::Upper));
        }
    }

    let mut x = DVector::from_column_slice(point);
    let mut act: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let slack = |x: &DVector<f64>, j: usize| normals[j].dot(x) - rhs[j];
    let max_steps = 200 * normals.len().max(1);
    let mut steps = 0;

    loop {
        let Some((pj, s)) = (0..normals.len())
            .filter(|j| !act.contains(j))
            .map(|j| (j, slack(&x, j)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if s >= -tol {
            break;
        }
        let mut u_plus = 0.0;
        loop {
            steps += 1;
            if steps > max_steps {
                return Err(Error::Infeasible);
            }
            let n_plus = &normals[pj];
            let r = if act.is_empty() {
                DVector::zeros(0)
            } else {
                let n = DMatrix::from_columns(
                    &act.iter().map(|&j| normals[j].clone()).collect::<Vec<_>>(),
                );
                let gram = n.transpose() * &n;
                let chol = gram
                    .cholesky()
                    .ok_or(Error::Factorization("active normals"))?;
                chol.solve(&(n.transpose() * n_plus))
            };
            let mut z = n_plus.clone();
            for (k, &j) in act.iter().enumerate() {
                z -= &normals[j] * r[k];
            }
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for k in 0..act.len() {
                if r[k] > 1e-14 {
                    let t = u[k] / r[k];
                    if t < t1 {
                        t1 = t;
                        drop = Some(k);
                    }
                }
            }
            let zn = z.dot(n_plus);
            let t2 = if z.norm() > 1e-12 * n_plus.norm() && zn > 0.0 {
                -slack(&x, pj) / zn
            } else {
                f64::INFINITY
            };
            if t1.is_infinite() && t2.is_infinite() {
                return Err(Error::Infeasible);
            }
            let t = t1.min(t2);
            if t2.is_finite() {
                x += &z * t;
            }
            for k in 0..act.len() {
                u[k] -= t * r[k];
            }
            u_plus += t;
            if t2 <= t1 {
                act.push(pj);
                u.push(u_plus);
                break;
            }
            let k = drop.expect("partial step has a blocking row");
            act.remove(k);
            u.remove(k);
        }
        debug_assert_eq!(d, x.len());
    }

    let active = act.iter().map(|&j| origin[j]).collect();
    let mu = u.iter().map(|&v| v.max(0.0)).collect();
    Ok((x.as_slice().to_vec(), active, mu))
}
