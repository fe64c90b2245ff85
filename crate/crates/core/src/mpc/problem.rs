//! JSON problem definition: `A`, `B` (row-major), `Q`, `R`, optional `P`,
//! `Ts`, `T`, `a`, `r`, `u_prev` and an optional initial state `x0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{CostSpec, LinearSystem};
use crate::projection::RateAmpSet;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(rename = "Ts", default)]
    pub ts: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "a")]
    pub amplitude: Vec<f64>,
    #[serde(rename = "r")]
    pub rate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_prev: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

/// A validated problem definition.
#[derive(Clone, Debug)]
pub struct MpcProblem {
    pub system: LinearSystem,
    pub cost: CostSpec,
    pub set: RateAmpSet,
    pub x0: Option<Vec<f64>>,
}

impl MpcProblem {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)?;
        file.validate()
    }
}

impl ProblemFile {
    pub fn validate(&self) -> Result<MpcProblem> {
        let a = matrix("A", &self.a)?;
        let b = matrix("B", &self.b)?;
        let system = LinearSystem::new(a, b, self.ts).map_err(|e| field_error("A/B", e))?;
        let (nx, nu) = (system.nx(), system.nu());

        let q = matrix("Q", &self.q)?;
        expect_square("Q", &q, nx)?;
        let r = matrix("R", &self.r)?;
        expect_square("R", &r, nu)?;
        let p = match &self.p {
            Some(rows) => {
                let p = matrix("P", rows)?;
                expect_square("P", &p, nx)?;
                Some(p)
            }
            None => None,
        };
        let cost = CostSpec::new(q, r, p, self.horizon)?;

        let u_prev = self.u_prev.clone().unwrap_or_else(|| vec![0.0; nu]);
        for (name, v) in [
            ("a", &self.amplitude),
            ("r", &self.rate),
            ("u_prev", &u_prev),
        ] {
            if v.len() != nu {
                return Err(Error::invalid(
                    name,
                    format!("expected {nu} entries, got {}", v.len()),
                ));
            }
        }
        let set = RateAmpSet::new(
            self.amplitude.clone(),
            self.rate.clone(),
            u_prev,
            self.horizon,
        )?;

        if let Some(x0) = &self.x0 {
            if x0.len() != nx {
                return Err(Error::invalid(
                    "x0",
                    format!("expected {nx} entries, got {}", x0.len()),
                ));
            }
            if x0.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("x0", "non-finite entry"));
            }
        }
        Ok(MpcProblem {
            system,
            cost,
            set,
            x0: self.x0.clone(),
        })
    }
}

fn matrix(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::invalid(field, "empty matrix"));
    }
    let ncols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::invalid(
                field,
                format!("row {i} has {} entries, expected {ncols}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                field,
                format!("entry ({i}, {j}) is not finite"),
            ));
        }
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn expect_square(field: &str, m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::invalid(
            field,
            format!("expected {n}x{n}, got {}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

fn field_error(field: &str, e: Error) -> Error {
    Error::invalid(field, e.to_string())
}
