//! Scalar root-finding helpers shared by the spectral solvers.
//!
//! All scans work on functions returning `Option<f64>`: `None` marks an
//! evaluation failure (typically pole proximity) and acts as a segment
//! break, so no bracket ever straddles an invalid point.

/// Result of a grid scan: refined roots plus tangency candidates (samples
/// where |f| dipped below the threshold without an adjacent sign change).
#[derive(Debug, Clone, Default)]
pub struct ScanOutcome {
    pub roots: Vec<f64>,
    pub tangencies: Vec<f64>,
}

/// Bisects a bracketing interval down to width `tol`.  `f_lo` must have the
/// opposite sign of `f` at `hi`.  Returns `None` if the function fails to
/// evaluate somewhere inside the bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> Option<f64>,
{
    debug_assert!(lo < hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Evaluates `f` on the grid `xs` (assumed ascending), bisects every sign
/// change between consecutive valid samples, and records tangency
/// candidates where |f| < `dip_threshold` at a local minimum of |f| with no
/// sign change on either side.
pub fn scan<F>(xs: &[f64], mut f: F, tol: f64, dip_threshold: f64) -> ScanOutcome
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut vals = Vec::with_capacity(xs.len());
    for &x in xs {
        vals.push(f(x));
    }

    let mut out = ScanOutcome::default();
    for i in 0..xs.len().saturating_sub(1) {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else {
            continue;
        };
        if a == 0.0 {
            out.roots.push(xs[i]);
            continue;
        }
        if (a < 0.0) != (b < 0.0) {
            if let Some(r) = bisect(&mut f, xs[i], xs[i + 1], a, tol) {
                out.roots.push(r);
            }
        }
    }
    for i in 1..xs.len().saturating_sub(1) {
        let (Some(prev), Some(cur), Some(next)) = (vals[i - 1], vals[i], vals[i + 1]) else {
            continue;
        };
        let no_flip = (prev < 0.0) == (cur < 0.0) && (next < 0.0) == (cur < 0.0);
        if no_flip
            && cur != 0.0
            && cur.abs() < dip_threshold
            && cur.abs() <= prev.abs()
            && cur.abs() <= next.abs()
        {
            out.tangencies.push(xs[i]);
        }
    }
    // Merge roots that collapsed onto (numerically) the same point.
    out.roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    out
}

/// Evenly spaced grid of `n >= 2` points covering [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
