use crate::projection::PairBounds;

/// Brute-force projection onto a pair set.
///
/// For every grid value of the first coordinate the feasible second
/// coordinates form an interval, so the best second coordinate is an exact
/// clamp. The first coordinate is searched on a grid of step `≤ a/2000` and
/// then refined by 10× shrinking around the incumbent until the step is below
/// `2e-7`. The column objective is convex, so the minimizer always lies within
/// one step of the incumbent.
pub fn grid_project_2d(point: [f64; 2], bounds: &PairBounds) -> [f64; 2] {
    let r = bounds.rate;
    let lo = bounds.a0_min.max(bounds.a1_min - r);
    let hi = bounds.a0_max.min(bounds.a1_max + r);
    let column = |u0: f64| {
        let y_lo = bounds.a1_min.max(u0 - r);
        let y_hi = bounds.a1_max.min(u0 + r);
        let y = point[1].clamp(y_lo, y_hi.max(y_lo));
        let d = (u0 - point[0]).powi(2) + (y - point[1]).powi(2);
        (d, [u0, y])
    };

    let mut step = (bounds.amplitude / 2000.0).min((hi - lo).max(f64::MIN_POSITIVE));
    let (mut best_d, mut best) = column(lo);
    let search = |from: f64, to: f64, step: f64, best_d: &mut f64, best: &mut [f64; 2]| {
        let count = ((to - from) / step).ceil().max(0.0) as usize;
        for i in 0..=count {
            let u0 = (from + i as f64 * step).min(to);
            let (d, pt) = column(u0);
            if d < *best_d {
                *best_d = d;
                *best = pt;
            }
        }
    };
    search(lo, hi, step, &mut best_d, &mut best);
    let mut rounds = 0;
    while rounds < 2 || step > 2e-7 {
        let centre = best[0];
        let (from, to) = ((centre - step).max(lo), (centre + step).min(hi));
        step /= 10.0;
        search(from, to, step, &mut best_d, &mut best);
        rounds += 1;
    }
    best
}
