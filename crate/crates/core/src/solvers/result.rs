use std::time::Duration;

/// One recorded outer iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `‖u_i − u*‖₂`, present when a reference was supplied.
    pub distance: Option<f64>,
    /// Iterate copy, stored only without a reference, every `trace_stride` iterations.
    pub snapshot: Option<Vec<f64>>,
    /// Time since the start of the solve.
    pub elapsed: Duration,
    /// Dykstra sweeps spent on this iteration (FGM only).
    pub inner_sweeps: usize,
    /// Dykstra correction increment at its last check (FGM only).
    pub inner_step: f64,
    /// `‖Ku − v‖∞` (ADMM only).
    pub primal_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub u_opt: Vec<f64>,
    /// First stage `u_0`, the applied control.
    pub u0_control: Vec<f64>,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub elapsed: Duration,
    /// Total Dykstra sweeps (FGM only).
    pub inner_sweeps: usize,
}

/// Drops the first stage and repeats the last one: the receding-horizon warm start.
pub fn shift_stages(u: &[f64], nu: usize) -> Vec<f64> {
    assert!(nu > 0 && u.len() % nu == 0 && u.len() >= nu);
    let mut out = Vec::with_capacity(u.len());
    out.extend_from_slice(&u[nu..]);
    out.extend_from_slice(&u[u.len() - nu..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_duplicates_last_stage() {
        assert_eq!(
            shift_stages(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2),
            vec![3.0, 4.0, 5.0, 6.0, 5.0, 6.0]
        );
        assert_eq!(shift_stages(&[7.0], 1), vec![7.0]);
    }
}
