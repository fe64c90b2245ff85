use nalgebra::{DMatrix, SymmetricEigen};

use super::{all_finite, is_symmetric};
use crate::{Error, Result};

/// Discrete-time pair `(A, B)`; `ts` is carried as metadata only.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    ts: f64,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, ts: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim("A columns", a.nrows(), a.ncols()));
        }
        if b.nrows() != a.nrows() {
            return Err(Error::dim("B rows", a.nrows(), b.nrows()));
        }
        if b.ncols() == 0 {
            return Err(Error::invalid("B", "needs at least one input column"));
        }
        if !all_finite(&a) {
            return Err(Error::invalid("A", "non-finite entry"));
        }
        if !all_finite(&b) {
            return Err(Error::invalid("B", "non-finite entry"));
        }
        if !ts.is_finite() || ts < 0.0 {
            return Err(Error::invalid("Ts", "must be finite and non-negative"));
        }
        Ok(Self { a, b, ts })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn nx(&self) -> usize {
        self.a.nrows()
    }

    pub fn nu(&self) -> usize {
        self.b.ncols()
    }

    /// One step of `x⁺ = A x + B u`, accumulated row by row: `A` terms first,
    /// then `B` terms, each in column order.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nx(), "state length");
        assert_eq!(u.len(), self.nu(), "input length");
        (0..self.nx())
            .map(|i| {
                let mut acc = 0.0;
                for (j, xj) in x.iter().enumerate() {
                    acc += self.a[(i, j)] * xj;
                }
                for (j, uj) in u.iter().enumerate() {
                    acc += self.b[(i, j)] * uj;
                }
                acc
            })
            .collect()
    }
}

/// Quadratic stage/terminal weights and horizon length.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub p: Option<DMatrix<f64>>,
    pub horizon: usize,
}

impl CostSpec {
    pub fn new(
        q: DMatrix<f64>,
        r: DMatrix<f64>,
        p: Option<DMatrix<f64>>,
        horizon: usize,
    ) -> Result<Self> {
        check_weight("Q", &q, false)?;
        check_weight("R", &r, true)?;
        if let Some(p) = &p {
            check_weight("P", p, true)?;
            if p.nrows() != q.nrows() {
                return Err(Error::dim("P", q.nrows(), p.nrows()));
            }
        }
        if horizon < 2 {
            return Err(Error::invalid(
                "T",
                format!("horizon must be >= 2, got {horizon}"),
            ));
        }
        Ok(Self { q, r, p, horizon })
    }

    pub fn check_against(&self, sys: &LinearSystem) -> Result<()> {
        if self.q.nrows() != sys.nx() {
            return Err(Error::dim("Q", sys.nx(), self.q.nrows()));
        }
        if self.r.nrows() != sys.nu() {
            return Err(Error::dim("R", sys.nu(), self.r.nrows()));
        }
        Ok(())
    }
}

fn check_weight(name: &'static str, m: &DMatrix<f64>, definite: bool) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dim(format!("{name} columns"), m.nrows(), m.ncols()));
    }
    if !all_finite(m) {
        return Err(Error::invalid(name, "non-finite entry"));
    }
    if !is_symmetric(m) {
        return Err(Error::invalid(name, "not symmetric"));
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.min();
    let slack = 1e-12 * m.amax().max(1.0);
    if definite && min <= 0.0 {
        return Err(Error::NotPositiveDefinite(name));
    }
    if !definite && min < -slack {
        return Err(Error::invalid(name, "not positive semidefinite"));
    }
    Ok(())
}
