use super::{PairProjector, RateAmpSet};
use crate::{Error, Result};

/// Pair-set group: `Odd` holds `U_1, U_3, …` (including the `u_{−1}`-shifted
/// first pair), `Even` holds `U_2, U_4, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn first_pair(self) -> usize {
        match self {
            Parity::Odd => 1,
            Parity::Even => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DykstraConfig {
    /// Sweep cap `J_max`; one sweep projects onto both groups.
    pub max_sweeps: usize,
    /// Stop when both correction increments `‖x_j − w_j‖∞` and
    /// `‖w_j − x_{j+1}‖∞` are below `tolerance` at a check; this bounds the
    /// step `‖x_{j+1} − x_j‖∞` by twice the tolerance.
    pub tolerance: f64,
    /// Check the stopping rule every `check_stride` sweeps.
    pub check_stride: usize,
}

impl DykstraConfig {
    /// Stand-alone projection.
    pub const STANDALONE: Self = Self {
        max_sweeps: 1000,
        tolerance: 1e-9,
        check_stride: 10,
    };

    /// Inner projection of the fast gradient method: a fixed budget of 50 sweeps.
    pub const INNER_FIXED: Self = Self {
        max_sweeps: 50,
        tolerance: 0.0,
        check_stride: 10,
    };

    /// Inner projection with the stopping rule checked every 10th sweep.
    pub const INNER_CHECKED: Self = Self {
        max_sweeps: 50,
        tolerance: 1e-9,
        check_stride: 10,
    };
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self::STANDALONE
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DykstraStats {
    pub sweeps: usize,
    /// Largest correction increment at the last check, `0` when the input was already feasible.
    pub last_step: f64,
    /// The input was in `U` and returned unchanged.
    pub skipped: bool,
}

/// Tolerance of the feasibility pre-check.
const PRECHECK_TOL: f64 = 1e-12;

/// Reusable buffers for Dykstra's iteration on one trajectory length.
#[derive(Clone, Debug)]
pub struct DykstraWorkspace {
    x: Vec<f64>,
    w: Vec<f64>,
    mu: Vec<f64>,
    gamma: Vec<f64>,
    projectors: Projectors,
}

impl DykstraWorkspace {
    pub fn new(dim: usize) -> Self {
        Self {
            x: vec![0.0; dim],
            w: vec![0.0; dim],
            mu: vec![0.0; dim],
            gamma: vec![0.0; dim],
            projectors: Projectors::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn project(
        &mut self,
        input: &[f64],
        set: &RateAmpSet,
        cfg: &DykstraConfig,
        out: &mut [f64],
    ) -> DykstraStats {
        self.project_observed(input, set, cfg, out, |_, _| {})
    }

    /// Runs the iteration, calling `observer(sweep, x)` after every sweep.
    ///
    /// The even group is projected first and the odd group second, so the
    /// output always satisfies the odd pair sets exactly, in particular the
    /// constraints on `u_0`.
    pub fn project_observed<F>(
        &mut self,
        input: &[f64],
        set: &RateAmpSet,
        cfg: &DykstraConfig,
        out: &mut [f64],
        mut observer: F,
    ) -> DykstraStats
    where
        F: FnMut(usize, &[f64]),
    {
        let n = set.dim();
        assert_eq!(input.len(), n, "input length");
        assert_eq!(out.len(), n, "output length");
        assert_eq!(self.dim(), n, "workspace length");

        if set.contains(input, PRECHECK_TOL) {
            out.copy_from_slice(input);
            return DykstraStats {
                sweeps: 0,
                last_step: 0.0,
                skipped: true,
            };
        }

        self.projectors.rebuild(set);
        let stride = cfg.check_stride.max(1);
        self.x.copy_from_slice(input);
        self.mu.fill(0.0);
        self.gamma.fill(0.0);
        let mut stats = DykstraStats::default();

        for sweep in 1..=cfg.max_sweeps {
            // w = P_e(x + μ),  μ ← x + μ − w
            self.projectors
                .corrected(&self.x, &mut self.mu, &mut self.w, Parity::Even);
            // x⁺ = P_o(w + γ),  γ ← w + γ − x⁺
            self.projectors
                .corrected(&self.w, &mut self.gamma, out, Parity::Odd);
            stats.sweeps = sweep;
            observer(sweep, out);

            let check = sweep % stride == 0 || sweep == cfg.max_sweeps;
            if check {
                // The increments of μ and γ are x − w and w − x⁺. Their sum is
                // the step; x can stall while they are still large.
                stats.last_step = (0..n)
                    .map(|i| {
                        (self.x[i] - self.w[i])
                            .abs()
                            .max((self.w[i] - out[i]).abs())
                    })
                    .fold(0.0, f64::max);
                if stats.last_step < cfg.tolerance {
                    break;
                }
            }
            self.x.copy_from_slice(out);
        }
        stats
    }
}

/// First-pair and later-pair projectors for every channel.
#[derive(Clone, Debug, Default)]
struct Projectors {
    first: Vec<PairProjector>,
    later: Vec<PairProjector>,
    nu: usize,
    horizon: usize,
}

impl Projectors {
    fn new(set: &RateAmpSet) -> Self {
        let mut p = Self::default();
        p.rebuild(set);
        p
    }

    /// Refills the tables for `set`, keeping their allocations.
    fn rebuild(&mut self, set: &RateAmpSet) {
        self.nu = set.n_u();
        self.horizon = set.horizon();
        self.first.clear();
        self.later.clear();
        self.first
            .extend((0..self.nu).map(|c| PairProjector::new(set.pair_bounds(c, true))));
        self.later
            .extend((0..self.nu).map(|c| PairProjector::new(set.pair_bounds(c, false))));
    }

    /// In-place projection onto every pair set `U_k` of the given parity;
    /// coordinates outside those pairs are untouched.
    fn apply(&self, u: &mut [f64], parity: Parity) {
        self.for_pairs(parity, |i0, i1, proj| {
            let [p0, p1] = proj.project([u[i0], u[i1]]);
            u[i0] = p0;
            u[i1] = p1;
        });
    }

    /// One half-sweep: `dst = P(src + corr)` and `corr ← src + corr − dst`.
    fn corrected(&self, src: &[f64], corr: &mut [f64], dst: &mut [f64], parity: Parity) {
        for ((d, c), s) in dst.iter_mut().zip(corr.iter_mut()).zip(src) {
            *d = s + *c;
            *c = 0.0;
        }
        self.for_pairs(parity, |i0, i1, proj| {
            let (z0, z1) = (dst[i0], dst[i1]);
            let [p0, p1] = proj.project([z0, z1]);
            dst[i0] = p0;
            dst[i1] = p1;
            corr[i0] = z0 - p0;
            corr[i1] = z1 - p1;
        });
    }

    #[inline]
    fn for_pairs<F: FnMut(usize, usize, &PairProjector)>(&self, parity: Parity, mut f: F) {
        let nu = self.nu;
        let mut k = parity.first_pair();
        while k < self.horizon {
            let table = if k == 1 { &self.first } else { &self.later };
            for (c, proj) in table.iter().enumerate() {
                f((k - 1) * nu + c, k * nu + c, proj);
            }
            k += 2;
        }
    }
}

/// Exact projection onto the intersection of the pair sets of one parity.
pub fn project_group(u: &[f64], set: &RateAmpSet, parity: Parity) -> Result<Vec<f64>> {
    if u.len() != set.dim() {
        return Err(Error::dim("trajectory", set.dim(), u.len()));
    }
    let mut out = u.to_vec();
    Projectors::new(set).apply(&mut out, parity);
    Ok(out)
}

/// Dykstra projection of `u0` onto the full set.
pub fn dykstra_project(
    u0: &[f64],
    set: &RateAmpSet,
    cfg: &DykstraConfig,
) -> Result<(Vec<f64>, DykstraStats)> {
    if u0.len() != set.dim() {
        return Err(Error::dim("trajectory", set.dim(), u0.len()));
    }
    let mut ws = DykstraWorkspace::new(set.dim());
    let mut out = vec![0.0; set.dim()];
    let stats = ws.project(u0, set, cfg, &mut out);
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::project_pair;

    #[test]
    fn feasible_input_is_returned_untouched() {
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 6).unwrap();
        let u = [0.2, 0.5, -0.3, 0.0, 0.9, 0.1];
        let (out, stats) = dykstra_project(&u, &set, &DykstraConfig::STANDALONE).unwrap();
        assert_eq!(out, u);
        assert_eq!(stats.sweeps, 0);
        assert!(stats.skipped);
        assert_eq!(project_group(&u, &set, Parity::Odd).unwrap(), u);
        assert_eq!(project_group(&u, &set, Parity::Even).unwrap(), u);
    }

    #[test]
    fn two_stage_case_is_one_pair_projection() {
        let set = RateAmpSet::scalar(1.0, 0.7, 0.3, 2).unwrap();
        let b = set.pair_bounds(0, true);
        for pt in [[3.0, -2.0], [-4.0, 4.0], [0.1, 2.5], [-1.5, -1.5]] {
            let expect = project_pair(pt, &b);
            assert_eq!(
                project_group(&pt, &set, Parity::Odd).unwrap(),
                expect.to_vec()
            );
            assert_eq!(project_group(&pt, &set, Parity::Even).unwrap(), pt.to_vec());
            let cfg = DykstraConfig {
                max_sweeps: 1,
                ..DykstraConfig::STANDALONE
            };
            let (out, _) = dykstra_project(&pt, &set, &cfg).unwrap();
            assert_eq!(out, expect.to_vec());
        }
    }

    #[test]
    fn group_touches_only_its_pairs() {
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 4).unwrap();
        let u = [5.0, -3.0, 2.5, -4.0];
        let odd = project_group(&u, &set, Parity::Odd).unwrap();
        let first = project_pair([u[0], u[1]], &set.pair_bounds(0, true));
        let third = project_pair([u[2], u[3]], &set.pair_bounds(0, false));
        assert_eq!(odd, vec![first[0], first[1], third[0], third[1]]);

        let even = project_group(&u, &set, Parity::Even).unwrap();
        let second = project_pair([u[1], u[2]], &set.pair_bounds(0, false));
        assert_eq!(even[0].to_bits(), u[0].to_bits());
        assert_eq!(even[3].to_bits(), u[3].to_bits());
        assert_eq!(&even[1..3], &second[..]);
    }

    #[test]
    fn odd_horizon_groups() {
        // T = 5: odd pairs k = 1, 3; even pairs k = 2, 4
        let set = RateAmpSet::scalar(1.0, 0.5, 0.0, 5).unwrap();
        let u = [3.0, -3.0, 3.0, -3.0, 3.0];
        let (out, stats) = dykstra_project(&u, &set, &DykstraConfig::STANDALONE).unwrap();
        assert!(stats.sweeps > 0);
        assert!(set.contains(&out, 1e-7));
    }

    #[test]
    fn length_mismatch_errors() {
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 4).unwrap();
        assert!(project_group(&[0.0; 3], &set, Parity::Odd).is_err());
        assert!(dykstra_project(&[0.0; 5], &set, &DykstraConfig::STANDALONE).is_err());
    }

    #[test]
    fn stops_at_tolerance_on_check_stride() {
        let set = RateAmpSet::scalar(1.0, 1.0, 0.0, 8).unwrap();
        let u: Vec<f64> = (0..8)
            .map(|i| if i % 2 == 0 { 4.0 } else { -4.0 })
            .collect();
        let (_, stats) = dykstra_project(&u, &set, &DykstraConfig::STANDALONE).unwrap();
        assert!(stats.sweeps % 10 == 0 || stats.sweeps == 1000);
        assert!(stats.last_step < 1e-9 || stats.sweeps == 1000);
    }

    #[test]
    fn stalled_iterate_does_not_stop_early() {
        // x stays at (0.01, 0.02, 0.1) for a few sweeps while the corrections move.
        let set = RateAmpSet::scalar(0.1, 0.01, 0.0, 3).unwrap();
        let u = [0.0, 0.46356165424687296, 0.4373583705317851];
        let cfg = DykstraConfig {
            max_sweeps: 5000,
            tolerance: 1e-13,
            check_stride: 10,
        };
        let (out, _) = dykstra_project(&u, &set, &cfg).unwrap();
        for (a, b) in out.iter().zip([0.01, 0.02, 0.03]) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
