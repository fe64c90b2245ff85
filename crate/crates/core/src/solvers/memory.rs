/// Dense-matrix and state-vector footprint of both solvers.
///
/// Two counting conventions are reported. `formula_ratio` evaluates
/// `T² / (T² + (T−1)² n_v/n_u)` with one lifted rate variable per input and
/// interior pair (the `2T − 1` decision-variable count). `dense_ratio` counts
/// this crate's matrices: FGM stores `M` (`n×n`), ADMM stores the factor of
/// `J + ρKᵀK` (`n×n`) plus the non-identity block of `K` (`n×n`), with
/// `n = n_u T` and `n_v = 2n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryFootprint {
    pub n_u: usize,
    pub horizon: usize,
    pub fgm_state_dim: usize,
    pub admm_state_dim: usize,
    pub n_v: usize,
    pub fgm_dense_entries: usize,
    pub admm_dense_entries: usize,
    pub dense_ratio: f64,
    /// Ratio when ADMM keeps the whole `2n×n` matrix `K` dense.
    pub full_k_ratio: f64,
    pub formula_ratio: f64,
}

pub fn memory_footprint(n_u: usize, horizon: usize) -> MemoryFootprint {
    let n = n_u * horizon;
    let n_v = 2 * n;
    let fgm = n * n;
    let admm = n * n + n * n;
    let t = horizon as f64;
    MemoryFootprint {
        n_u,
        horizon,
        fgm_state_dim: n,
        admm_state_dim: n + 2 * n_v,
        n_v,
        fgm_dense_entries: fgm,
        admm_dense_entries: admm,
        dense_ratio: fgm as f64 / admm as f64,
        full_k_ratio: fgm as f64 / (n * n + n_v * n) as f64,
        formula_ratio: t * t / (t * t + (t - 1.0) * (t - 1.0)),
    }
}
