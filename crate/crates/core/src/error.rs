use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error(
        "DARE iteration did not converge in {iterations} iterations (last step {last_step:e})"
    )]
    DareNotConverged { iterations: usize, last_step: f64 },

    #[error("DARE residual {0:e} exceeds tolerance")]
    DareResidual(f64),

    #[error("condensed Hessian not strongly convex (lambda_min = {0:e})")]
    NotStronglyConvex(f64),

    #[error("power iteration stagnated after {0} iterations")]
    PowerIteration(usize),

    #[error("factorization failed: {0}")]
    Factorization(&'static str),

    #[error("non-finite iterate at iteration {0}")]
    NonFinite(usize),

    #[error("{rows} constraint rows exceed the enumeration guard of {limit}; use reference_solve")]
    OracleGuard { rows: usize, limit: usize },

    #[error("constraint set is empty")]
    Infeasible,

    #[error(
        "reference solve missed its target: kkt residual {kkt:e}, primal {primal:e}, dual {dual:e}"
    )]
    ReferenceUnmet { kkt: f64, primal: f64, dual: f64 },

    #[error("problem file: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(what: impl Into<String>, expected: usize, got: usize) -> Self {
        Error::Dimension {
            what: what.into(),
            expected,
            got,
        }
    }
}
