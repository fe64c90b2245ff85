//! Closed-form Euclidean projection onto one rate/amplitude pair set
//!
//! `S = { (u0, u1) : a0_min ≤ u0 ≤ a0_max, |u1| ≤ a, |u1 − u0| ≤ r }`.
//!
//! `S` is a hexagon (possibly with collapsed edges) bounded by the box
//! `[a0_min, a0_max] × [a1_min, a1_max]` and the two rate diagonals
//! `u1 − u0 = ±r`. The plane splits into eight regions, each with an affine
//! (or constant) projection map:
//!
//! - `C1 … C4`: normal cones of the corners where a diagonal meets the box;
//!   mapped to the corner `c_i`.
//! - `A1`, `A2`: strips above the upper / below the lower diagonal edge;
//!   the rotated coordinate `p̃` is saturated to `±r/√2`.
//! - `B1`, `B2`: everything else (lower-left and upper-right halves,
//!   including the interior); the box clamp is exact there.
//!
//! Point location uses the rotated coordinate `p = (u0 + u1)/√2` against the
//! corner projections `p_{c_i}` and finishes with a comparison of one original
//! coordinate against the corner.

use std::f64::consts::FRAC_1_SQRT_2;

/// Interval data for one pair set. `a0_*` bound the first coordinate and
/// `a1_*` are the induced bounds on the second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairBounds {
    pub a0_min: f64,
    pub a0_max: f64,
    pub a1_min: f64,
    pub a1_max: f64,
    pub amplitude: f64,
    pub rate: f64,
}

impl PairBounds {
    /// The pair `(u_0, u_1)`, whose first coordinate is rate-limited against `u_{−1}`.
    pub fn first(a: f64, r: f64, u_prev: f64) -> Self {
        Self::with_first_interval(a, r, (-a).max(u_prev - r), a.min(u_prev + r))
    }

    /// Any later pair `(u_{k−1}, u_k)`, `k > 1`.
    pub fn interior(a: f64, r: f64) -> Self {
        Self::with_first_interval(a, r, -a, a)
    }

    fn with_first_interval(a: f64, r: f64, a0_min: f64, a0_max: f64) -> Self {
        Self {
            a0_min,
            a0_max,
            a1_min: (-a).max(a0_min - r),
            a1_max: a.min(a0_max + r),
            amplitude: a,
            rate: r,
        }
    }

    pub fn corners(&self) -> CornerSet {
        let (a, r) = (self.amplitude, self.rate);
        let (lo, hi) = (self.a0_min, self.a0_max);
        let c = [
            [lo, (r + lo).min(a)],
            [(a - r).min(hi), a.min(r + hi)],
            [hi, hi - r],
            [(r - a).max(lo), (-a).max(lo - r)],
        ];
        let p = c.map(|ci| (ci[0] + ci[1]) * FRAC_1_SQRT_2);
        CornerSet { c, p }
    }

    pub fn contains(&self, pt: [f64; 2], tol: f64) -> bool {
        let [u0, u1] = pt;
        u0 >= self.a0_min - tol
            && u0 <= self.a0_max + tol
            && u1.abs() <= self.amplitude + tol
            && (u1 - u0).abs() <= self.rate + tol
    }

    fn clamp_box(&self, pt: [f64; 2]) -> [f64; 2] {
        [
            pt[0].clamp(self.a0_min, self.a0_max),
            pt[1].clamp(self.a1_min, self.a1_max),
        ]
    }
}

/// Corner points `c1 … c4` and their coordinates `p_{c_i}` along the p-diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerSet {
    pub c: [[f64; 2]; 4],
    pub p: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
    C3,
    C4,
}

impl Region {
    pub const ALL: [Region; 8] = [
        Region::A1,
        Region::A2,
        Region::B1,
        Region::B2,
        Region::C1,
        Region::C2,
        Region::C3,
        Region::C4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::A1 => "A1",
            Region::A2 => "A2",
            Region::B1 => "B1",
            Region::B2 => "B2",
            Region::C1 => "C1",
            Region::C2 => "C2",
            Region::C3 => "C3",
            Region::C4 => "C4",
        }
    }
}

/// `(u0, u1) ↦ (p, p̃)` with `p = (u0 + u1)/√2`, `p̃ = (u1 − u0)/√2`.
pub fn rotate45(pt: [f64; 2]) -> [f64; 2] {
    [
        (pt[0] + pt[1]) * FRAC_1_SQRT_2,
        (pt[1] - pt[0]) * FRAC_1_SQRT_2,
    ]
}

pub fn unrotate45(rot: [f64; 2]) -> [f64; 2] {
    [
        (rot[0] - rot[1]) * FRAC_1_SQRT_2,
        (rot[0] + rot[1]) * FRAC_1_SQRT_2,
    ]
}

/// Pair bounds with their corners precomputed, for repeated projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairProjector {
    bounds: PairBounds,
    corners: CornerSet,
    /// `u1 − u0 = r` meets the top edge left of `a0_max`, so the top edge has
    /// positive length and `c2` lies on it.
    top_edge: bool,
    /// Likewise for `c4` and the bottom edge.
    bottom_edge: bool,
}

impl PairProjector {
    pub fn new(bounds: PairBounds) -> Self {
        let (a, r) = (bounds.amplitude, bounds.rate);
        Self {
            corners: bounds.corners(),
            top_edge: bounds.a0_max > a - r,
            bottom_edge: bounds.a0_min < r - a,
            bounds,
        }
    }

    pub fn bounds(&self) -> &PairBounds {
        &self.bounds
    }

    pub fn corners(&self) -> &CornerSet {
        &self.corners
    }

    /// Region lookup; shared borders resolve with precedence C, then A, then B.
    pub fn classify(&self, pt: [f64; 2]) -> Region {
        let [p, pt_rot] = rotate45(pt);
        let half_rate = self.bounds.rate * FRAC_1_SQRT_2;
        let CornerSet { c, p: pc } = self.corners;
        let [u0, u1] = pt;

        if pt_rot > half_rate {
            if p <= pc[0] {
                if u1 >= c[0][1] {
                    return Region::C1;
                }
                return Region::B1;
            }
            if p >= pc[1] {
                if !self.top_edge || u0 <= c[1][0] {
                    return Region::C2;
                }
                if p > pc[1] {
                    return Region::B2;
                }
            }
            return Region::A1;
        }
        if pt_rot < -half_rate {
            if p >= pc[2] {
                if u1 <= c[2][1] {
                    return Region::C3;
                }
                return Region::B2;
            }
            if p <= pc[3] {
                if !self.bottom_edge || u0 >= c[3][0] {
                    return Region::C4;
                }
                if p < pc[3] {
                    return Region::B1;
                }
            }
            return Region::A2;
        }
        // Rate-feasible band: the box clamp is exact; split the band at the
        // mean corner position so the two box regions have a fixed meaning.
        if p < 0.25 * (pc[0] + pc[1] + pc[2] + pc[3]) {
            Region::B1
        } else {
            Region::B2
        }
    }

    pub fn apply(&self, region: Region, pt: [f64; 2]) -> [f64; 2] {
        let half_rate = self.bounds.rate * FRAC_1_SQRT_2;
        match region {
            Region::C1 => self.corners.c[0],
            Region::C2 => self.corners.c[1],
            Region::C3 => self.corners.c[2],
            Region::C4 => self.corners.c[3],
            Region::A1 => unrotate45([rotate45(pt)[0], half_rate]),
            Region::A2 => unrotate45([rotate45(pt)[0], -half_rate]),
            Region::B1 | Region::B2 => self.bounds.clamp_box(pt),
        }
    }

    pub fn project(&self, pt: [f64; 2]) -> [f64; 2] {
        self.apply(self.classify(pt), pt)
    }
}

pub fn classify_region(pt: [f64; 2], bounds: &PairBounds) -> Region {
    PairProjector::new(*bounds).classify(pt)
}

/// Euclidean projection onto the pair set.
pub fn project_pair(pt: [f64; 2], bounds: &PairBounds) -> [f64; 2] {
    PairProjector::new(*bounds).project(pt)
}
