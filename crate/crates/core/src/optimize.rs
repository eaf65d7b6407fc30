//! One-dimensional search helpers: log-spaced scans, golden-section
//! maximization and sign bisection.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2

/// `n` points spaced uniformly in `ln x` from `lo` to `hi` (either order),
/// endpoints exact.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0 && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `n` uniformly spaced points over `[lo, hi]`, endpoints included.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Index of the largest value, ignoring NaNs. `None` for an empty slice.
pub fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `rel_tol · |x|` (or after 300
/// iterations, which is past the point where the bracket stops shrinking in
/// double precision). Returns the final bracket.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo, hi)
}

/// Bisection on the sign of `g`, given `g(lo) > 0 ≥ g(hi)` (or the reverse).
/// Runs until the bracket cannot shrink further in floating point.
pub fn bisect_sign<G>(g: G, mut lo: f64, mut hi: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    let lo_positive = g(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Vertex of the parabola through three equally spaced samples
/// `(x - h, y0), (x, y1), (x + h, y2)`, returned as an offset from `x` in
/// units of `h`. Falls back to 0 when the samples are collinear.
pub fn parabolic_vertex_offset(y0: f64, y1: f64, y2: f64) -> f64 {
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        0.0
    } else {
        0.5 * (y0 - y2) / denom
    }
}
