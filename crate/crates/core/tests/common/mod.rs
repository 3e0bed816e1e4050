//! Shared helpers for the integration suites: an independently coded
//! reference solver for the u = 0 limit and a tiny bisection utility, both
//! deliberately separate from the library's own code paths.

/// Reference G-function of the u = 0 model in the standard continued
/// parametrization: with x = E + g^2 and the scaled coefficients
/// T_n = K_n g^n,
///
/// ```text
/// (n + 1) T_{n+1} = g f_n(x) T_n - g^2 T_{n-1},
/// f_n(x) = 2 g + (n - x) / (2 g) - delta^2 / (8 g (n - x)),
/// G_sigma = sum_n T_n (1 + sigma delta / (2 (x - n))),
/// ```
///
/// with sigma = +1 for even parity and -1 for odd.
pub fn qrm_g(energy: f64, delta: f64, g: f64, sigma: f64) -> f64 {
    let x = energy + g * g;
    let mut t_prev = 0.0f64;
    let mut t = 1.0f64;
    let mut acc = t * (1.0 + sigma * delta / (2.0 * x));
    let mut max_term = acc.abs();
    let mut small = 0;
    for n in 0..400usize {
        let xi = n as f64 - x;
        let f = 2.0 * g + xi / (2.0 * g) - delta * delta / (8.0 * g * xi);
        let t_next = (g * f * t - g * g * t_prev) / (n as f64 + 1.0);
        t_prev = t;
        t = t_next;
        let m = n as f64 + 1.0;
        let term = t * (1.0 + sigma * delta / (2.0 * (x - m)));
        acc += term;
        max_term = max_term.max(term.abs());
        if term.abs() < 1e-16 * max_term.max(1.0) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    acc
}

/// Plain bisection, separate from the library's root machinery.
pub fn bisect_plain(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots of the u = 0 reference G-function of one parity inside
/// `[lo, hi]`, scanned per inter-pole segment (poles at E = n - g^2).
pub fn qrm_roots(delta: f64, g: f64, lo: f64, hi: f64, sigma: f64) -> Vec<f64> {
    let mut bounds = vec![lo];
    let mut n = 0.0f64;
    loop {
        let p = n - g * g;
        if p > hi {
            break;
        }
        if p > lo {
            bounds.push(p);
        }
        n += 1.0;
    }
    bounds.push(hi);

    let mut roots = Vec::new();
    for win in bounds.windows(2) {
        let (a, b) = (win[0] + 1e-7, win[1] - 1e-7);
        if a >= b {
            continue;
        }
        let steps = 600;
        let mut prev_e = a;
        let mut prev_v = qrm_g(a, delta, g, sigma);
        for k in 1..=steps {
            let e = a + (b - a) * k as f64 / steps as f64;
            let v = qrm_g(e, delta, g, sigma);
            if prev_v * v < 0.0 {
                roots.push(bisect_plain(|t| qrm_g(t, delta, g, sigma), prev_e, e));
            }
            prev_e = e;
            prev_v = v;
        }
    }
    roots
}
