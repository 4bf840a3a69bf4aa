//! One-dimensional convex minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITERS: usize = 400;

/// Minimum of a unimodal function on `[lo, hi]` by golden-section search,
/// followed by a comparison against both endpoints (minima of convex maps on
/// a closed interval often sit at an endpoint). `+inf` values are allowed.
pub(crate) fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_GOLDEN_ITERS {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Maximum of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_min(|t| -f(t), lo, hi, x_tol);
    (x, -v)
}

/// Minimum of a convex function on `[0, inf)` whose minimizer is known to be
/// finite (the function eventually increases). The bracket is expanded
/// geometrically until an increase is seen.
pub(crate) fn minimize_convex_halfline(f: impl Fn(f64) -> f64, rel_tol: f64) -> (f64, f64) {
    let f0 = f(0.0);
    let mut prev = (0.0, f0);
    let mut cur = (1.0, f(1.0));
    if cur.1 >= prev.1 {
        return golden_section_min(&f, 0.0, 1.0, rel_tol);
    }
    for _ in 0..1100 {
        let x = cur.0 * 2.0;
        let next = (x, f(x));
        if next.1 >= cur.1 || !next.0.is_finite() {
            let hi = next.0.min(f64::MAX);
            return golden_section_min(&f, prev.0, hi, rel_tol * hi.max(1.0));
        }
        prev = cur;
        cur = next;
    }
    cur
}
