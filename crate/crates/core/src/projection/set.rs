use super::PairBounds;
use crate::{Error, Result};

/// Per-channel amplitude and rate limits over a horizon of `T` stages, with the
/// previously applied input `u_{−1}`. Trajectories are stored stage-major:
/// entry `k·n_u + c` is channel `c` of stage `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateAmpSet {
    amplitude: Vec<f64>,
    rate: Vec<f64>,
    u_prev: Vec<f64>,
    horizon: usize,
}

/// Slack allowed on `|u_prev| ≤ a`, for previous inputs produced by a solver
/// that meets the amplitude limit only to round-off.
const U_PREV_SLACK: f64 = 1e-9;

impl RateAmpSet {
    pub fn new(
        amplitude: Vec<f64>,
        rate: Vec<f64>,
        u_prev: Vec<f64>,
        horizon: usize,
    ) -> Result<Self> {
        let nu = amplitude.len();
        if nu == 0 {
            return Err(Error::invalid("a", "at least one channel required"));
        }
        if rate.len() != nu {
            return Err(Error::dim("r", nu, rate.len()));
        }
        if horizon < 2 {
            return Err(Error::invalid(
                "T",
                format!("horizon must be >= 2, got {horizon}"),
            ));
        }
        for c in 0..nu {
            let (a, r) = (amplitude[c], rate[c]);
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::invalid(
                    "a",
                    format!("channel {c}: amplitude must be positive, got {a}"),
                ));
            }
            if !(r.is_finite() && r > 0.0 && r <= 2.0 * a) {
                return Err(Error::invalid(
                    "r",
                    format!("channel {c}: need 0 < r <= 2a, got r = {r}, a = {a}"),
                ));
            }
        }
        let mut set = Self {
            amplitude,
            rate,
            u_prev: vec![0.0; nu],
            horizon,
        };
        set.set_u_prev(&u_prev)?;
        Ok(set)
    }

    /// Single-channel set.
    pub fn scalar(a: f64, r: f64, u_prev: f64, horizon: usize) -> Result<Self> {
        Self::new(vec![a], vec![r], vec![u_prev], horizon)
    }

    /// Replaces `u_{−1}`; `|u_prev| ≤ a` keeps `U` nonempty.
    pub fn set_u_prev(&mut self, u_prev: &[f64]) -> Result<()> {
        if u_prev.len() != self.n_u() {
            return Err(Error::dim("u_prev", self.n_u(), u_prev.len()));
        }
        for (c, (&u, &a)) in u_prev.iter().zip(&self.amplitude).enumerate() {
            if !u.is_finite() || u.abs() > a * (1.0 + U_PREV_SLACK) {
                return Err(Error::invalid(
                    "u_prev",
                    format!("channel {c}: |{u}| exceeds amplitude {a}"),
                ));
            }
        }
        self.u_prev.copy_from_slice(u_prev);
        Ok(())
    }

    pub fn with_u_prev(&self, u_prev: &[f64]) -> Result<Self> {
        let mut s = self.clone();
        s.set_u_prev(u_prev)?;
        Ok(s)
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        Self::new(
            self.amplitude.clone(),
            self.rate.clone(),
            self.u_prev.clone(),
            horizon,
        )
    }

    pub fn n_u(&self) -> usize {
        self.amplitude.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Length of a trajectory, `n_u·T`.
    pub fn dim(&self) -> usize {
        self.n_u() * self.horizon
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn rate(&self) -> &[f64] {
        &self.rate
    }

    pub fn u_prev(&self) -> &[f64] {
        &self.u_prev
    }

    pub fn pair_bounds(&self, channel: usize, first_pair: bool) -> PairBounds {
        pair_bounds(self, channel, first_pair)
    }

    /// Largest constraint violation (negative when strictly inside).
    pub fn max_violation(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.dim(), "trajectory length");
        let nu = self.n_u();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..self.horizon {
            for c in 0..nu {
                let x = u[k * nu + c];
                let prev = if k == 0 {
                    self.u_prev[c]
                } else {
                    u[(k - 1) * nu + c]
                };
                worst = worst
                    .max(x.abs() - self.amplitude[c])
                    .max((x - prev).abs() - self.rate[c]);
            }
        }
        worst
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        contains(u, self, tol)
    }
}

/// Bounds of the pair set on `(u_{k−1}, u_k)` for one channel. The first pair
/// also carries the rate limit relative to `u_{−1}`.
pub fn pair_bounds(set: &RateAmpSet, channel: usize, first_pair: bool) -> PairBounds {
    let (a, r) = (set.amplitude[channel], set.rate[channel]);
    if first_pair {
        PairBounds::first(a, r, set.u_prev[channel])
    } else {
        PairBounds::interior(a, r)
    }
}

/// Every amplitude and rate constraint, including the rate against `u_{−1}`,
/// holds within `tol`.
pub fn contains(u: &[f64], set: &RateAmpSet, tol: f64) -> bool {
    let nu = set.n_u();
    assert_eq!(u.len(), set.dim(), "trajectory length");
    for k in 0..set.horizon {
        for c in 0..nu {
            let x = u[k * nu + c];
            let prev = if k == 0 {
                set.u_prev[c]
            } else {
                u[(k - 1) * nu + c]
            };
            if !(x.abs() <= set.amplitude[c] + tol) || !((x - prev).abs() <= set.rate[c] + tol) {
                return false;
            }
        }
    }
    true
}
