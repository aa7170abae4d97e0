//! One-dimensional search helpers: bracketed bisection, golden-section
//! refinement and a log-spaced grid scan that seeds it.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Root of a function with `f(lo) < 0 < f(hi)` (or the reverse), by
/// bisection until the bracket is narrower than `tol`.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_neg = f(lo) < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        if (f(mid) < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization on `[a, b]` until the bracket width falls
/// below `rel_tol * |x|`. Returns `(x, f(x))`.
pub(crate) fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= rel_tol * 0.5 * (c.abs() + d.abs()) {
            break;
        }
        if fc < fd {
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
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f` on `[lo, hi]` (both > 0): evaluates `points` log-spaced
/// samples, then refines the best sample's neighbourhood by golden
/// section. Non-finite evaluations count as `+inf`.
///
/// Returns `None` if every sample is non-finite.
pub(crate) fn minimize_log_grid<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    rel_tol: f64,
) -> Option<(f64, f64)> {
    debug_assert!(lo > 0.0 && hi > lo && points >= 3);
    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                (log_lo + step * i as f64).exp()
            }
        })
        .collect();

    let mut best = None::<(usize, f64)>;
    for (i, &x) in grid.iter().enumerate() {
        let fx = f(x);
        if fx.is_finite() && best.is_none_or(|(_, fb)| fx < fb) {
            best = Some((i, fx));
        }
    }
    let (i, f_best) = best?;

    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(points - 1)];
    let (x, fx) = golden_section(
        |x| {
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        },
        a,
        b,
        rel_tol,
    );
    if fx <= f_best {
        Some((x, fx))
    } else {
        Some((grid[i], f_best))
    }
}
