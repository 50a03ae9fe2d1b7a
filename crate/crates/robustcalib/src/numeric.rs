//! Small numeric building blocks: grid minimization with golden-section
//! refinement, and the lower convex hull of a planar point set.

/// Inverse golden ratio conjugate used to split brackets: 1/phi^2.
const GOLDEN_SPLIT: f64 = 0.381966011250105; // (3 - sqrt(5)) / 2

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Converges to a local minimum; callers bracket the global one first (see
/// [`grid_min_refined`]). Returns `(argmin, min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    debug_assert!(lo <= hi);
    let mut a = lo;
    let mut b = hi;
    let mut x1 = a + GOLDEN_SPLIT * (b - a);
    let mut x2 = b - GOLDEN_SPLIT * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0usize;
    while (b - a) > xtol && iter < 200 {
        iter += 1;
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN_SPLIT * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN_SPLIT * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    // Return the best of the points actually evaluated.
    let mut best = (xm, fm);
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    best
}

/// Minimize `f` over `[lo, hi]`: evaluate on an `n`-point uniform grid, then
/// refine the best bracket (one cell on each side of the grid argmin) by
/// golden-section search to `xtol`. Returns `(argmin, min)`.
pub fn grid_min_refined<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    xtol: f64,
) -> (f64, f64) {
    debug_assert!(n >= 2);
    if lo == hi {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bl = lo + step * best_i.saturating_sub(1) as f64;
    let bh = (lo + step * (best_i + 1) as f64).min(hi);
    let (gx, gv) = golden_section_min(&f, bl, bh, xtol);
    if gv < best_v {
        (gx, gv)
    } else {
        (lo + step * best_i as f64, best_v)
    }
}

/// Lower convex hull of a planar point set, by the monotone-chain algorithm.
///
/// Input points must be sorted by strictly increasing x. The result is the
/// vertex sequence of the lower hull, left to right; linearly interpolating
/// between consecutive vertices gives the lower convex envelope of the input.
pub fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    debug_assert!(points.windows(2).all(|w| w[0].0 < w[1].0));
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep b only if it lies strictly below the chord a -> p.
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Evaluate the piecewise-linear interpolant through `vertices` (sorted by x)
/// at `x`, clamping to the end values outside the vertex range.
pub fn interp_piecewise_linear(vertices: &[(f64, f64)], x: f64) -> f64 {
    debug_assert!(!vertices.is_empty());
    if x <= vertices[0].0 {
        return vertices[0].1;
    }
    if x >= vertices[vertices.len() - 1].0 {
        return vertices[vertices.len() - 1].1;
    }
    let i = vertices.partition_point(|v| v.0 <= x);
    let (x0, y0) = vertices[i - 1];
    let (x1, y1) = vertices[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
