//! The spectral G-functions and their pole ladder.
//!
//! Regular eigenvalues are the zeros of the parity-resolved transcendental
//! function
//!
//! ```text
//! G_parity(E) = sum_n (Omega_n -+ 1) f_n w^n = sum_n (x_n -+ y_n) tt_n ,
//! ```
//!
//! where the minus sign belongs to even parity.  G diverges on an analytic
//! ladder of energies (in units of omega)
//!
//! ```text
//! E_n = (1 - u^2/4) n - u delta / 4 - g^2        (n >= 1),
//! E_0 = -(g^2 + u delta / 4) / s + u delta / (4 - u^2 + 4 s) ,
//! ```
//!
//! with `s = sqrt(1 - u^2/4)`; the n = 0 member comes from the vanishing of
//! the seed denominator y_0, not from the ladder formula, and the two
//! expressions only coincide at u = 0.  Between consecutive poles G is
//! smooth, so root bracketing is done per inter-pole segment.  The
//! divergences of the coefficient ratio Omega_n at E_Omega_n are *not*
//! poles of G (f_n has a compensating zero there); they are exposed
//! separately for diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{self, ModelParams, Parity, Seed, SolverConfig};

/// The analytic divergence structure of G inside one energy window, in the
/// caller's units.
#[derive(Debug, Clone, Serialize)]
pub struct PoleSet {
    /// Zeroth pole (seed-denominator zero).
    pub zeroth: f64,
    /// Ladder poles for n = 1..; ascending with exact spacing
    /// omega (1 - u^2/4).
    pub ladder: Vec<f64>,
    /// Divergence energies of the coefficient ratio for n = 0..; these are
    /// not poles of G (diagnostic only).
    pub ratio: Vec<f64>,
}

impl PoleSet {
    /// All true G-poles (zeroth + ladder) inside `[lo, hi]`, ascending.
    pub fn in_window(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = std::iter::once(self.zeroth)
            .chain(self.ladder.iter().copied())
            .filter(|&p| p >= lo && p <= hi)
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// n-th ladder pole of G (n >= 1), caller units.
pub fn ladder_pole(params: &ModelParams, n: usize) -> Result<f64> {
    params.require_displaced()?;
    if n == 0 {
        return Err(Error::InvalidParams(
            "the ladder formula does not cover n = 0; the zeroth pole has its own form".into(),
        ));
    }
    Ok(params.reduced().ladder_pole(n) * params.omega)
}

/// Zeroth pole of G, caller units.
pub fn seed_pole(params: &ModelParams) -> Result<f64> {
    params.require_displaced()?;
    Ok(params.reduced().seed_pole() * params.omega)
}

/// Divergence energy of the coefficient ratio Omega_n (not a pole of G for
/// n >= 1; coincides with the zeroth pole at n = 0), caller units.
pub fn ratio_divergence(params: &ModelParams, n: usize) -> Result<f64> {
    params.require_displaced()?;
    Ok(params.reduced().ratio_pole(n) * params.omega)
}

/// Every pole relevant to the window `[lo, hi]`, with two extra ladder
/// entries beyond the upper edge so adjacent scans always see their
/// bounding poles.
pub fn pole_set(params: &ModelParams, lo: f64, hi: f64) -> Result<PoleSet> {
    params.require_displaced()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!(
            "energy window [{lo}, {hi}] is empty or not finite"
        )));
    }
    let rd = params.reduced();
    let om = params.omega;
    let s2 = rd.s * rd.s;
    let n_cap = (((hi / om - rd.ladder_pole(0)) / s2).ceil().max(1.0) as usize) + 2;
    Ok(PoleSet {
        zeroth: rd.seed_pole() * om,
        ladder: (1..=n_cap).map(|n| rd.ladder_pole(n) * om).collect(),
        ratio: (0..=n_cap).map(|n| rd.ratio_pole(n) * om).collect(),
    })
}

fn rescale(err: Error, omega: f64) -> Error {
    match err {
        Error::NearPole { index, energy, pole } => Error::NearPole {
            index,
            energy: energy * omega,
            pole: pole * omega,
        },
        other => other,
    }
}

/// G value of one parity at `energy` (caller units).
///
/// Errors with [`Error::NearPole`] inside the pole-exclusion radius and
/// with [`Error::SeriesNotConverged`] when the expansion did not reach the
/// configured tail tolerance by `cfg.max_order`.
pub fn evaluate(energy: f64, parity: Parity, params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    Ok(evaluate_pair_impl(energy, params, cfg)?[match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    }])
}

/// Both parity G values from a single coefficient ladder.
pub fn evaluate_pair(energy: f64, params: &ModelParams, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let [even, odd] = evaluate_pair_impl(energy, params, cfg)?;
    Ok((even, odd))
}

fn evaluate_pair_impl(energy: f64, params: &ModelParams, cfg: &SolverConfig) -> Result<[f64; 2]> {
    params.require_displaced()?;
    let rd = params.reduced();
    let lad = model::ladder(energy / params.omega, &rd, cfg, Seed::Regular)
        .map_err(|e| rescale(e, params.omega))?;
    if !lad.converged {
        return Err(Error::SeriesNotConverged {
            order: lad.order,
            energy,
        });
    }
    Ok([lad.g_value(Parity::Even), lad.g_value(Parity::Odd)])
}

/// One sampled row of a G-curve.  `even`/`odd` are `None` where the value
/// could not be computed; rows with `is_break` mark pole locations and
/// carry no values.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub energy: f64,
    pub even: Option<f64>,
    pub odd: Option<f64>,
    pub is_break: bool,
}

/// A pole-aware sampling of both parity G-functions over one window.
#[derive(Debug, Clone, Serialize)]
pub struct GCurve {
    pub points: Vec<CurvePoint>,
    pub poles: PoleSet,
}

/// Samples both G-functions on `[lo, hi]` (caller units), splitting the
/// window at the poles: roughly `samples` points are distributed over the
/// inter-pole segments by length, segment ends adjacent to a pole are inset
/// beyond the exclusion radius, and a break row is emitted at each interior
/// pole.
pub fn curve(params: &ModelParams, lo: f64, hi: f64, samples: usize, cfg: &SolverConfig) -> Result<GCurve> {
    let poles = pole_set(params, lo, hi)?;
    if samples < 2 {
        return Err(Error::InvalidParams(format!(
            "curve sampling needs at least 2 points, got {samples}"
        )));
    }
    let breaks = poles.in_window(lo, hi);
    let guard = 4.0 * cfg.pole_guard * params.omega;

    // Segment boundaries: window edges plus interior poles.
    let mut bounds = Vec::with_capacity(breaks.len() + 2);
    bounds.push(lo);
    bounds.extend(breaks.iter().copied());
    bounds.push(hi);

    let span = hi - lo;
    let mut xs: Vec<f64> = Vec::with_capacity(samples + bounds.len());
    let mut segments: Vec<(usize, usize)> = Vec::new(); // index range into xs per segment
    for win in bounds.windows(2) {
        let (mut a, mut b) = (win[0], win[1]);
        // Inset pole-adjacent ends past the exclusion radius.
        if breaks.contains(&a) {
            a += guard.min((b - a) * 0.05);
        }
        if breaks.contains(&b) {
            b -= guard.min((b - a) * 0.05);
        }
        if !(a < b) {
            segments.push((xs.len(), xs.len()));
            continue;
        }
        let n = (((b - a) / span * samples as f64).round() as usize).max(2);
        let start = xs.len();
        xs.extend(crate::roots::linspace(a, b, n));
        segments.push((start, xs.len()));
    }

    let values = exec::map(&xs, |&e| evaluate_pair(e, params, cfg).ok());

    let mut points = Vec::with_capacity(xs.len() + breaks.len());
    for (i, (start, end)) in segments.iter().enumerate() {
        if i > 0 {
            points.push(CurvePoint {
                energy: bounds[i],
                even: None,
                odd: None,
                is_break: true,
            });
        }
        for k in *start..*end {
            let (even, odd) = match values[k] {
                Some((ge, go)) => (Some(ge), Some(go)),
                None => (None, None),
            };
            points.push(CurvePoint {
                energy: xs[k],
                even,
                odd,
                is_break: false,
            });
        }
    }
    Ok(GCurve { points, poles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed;
    use approx::assert_relative_eq;

    fn params(delta: f64, u: f64, g: f64) -> ModelParams {
        ModelParams::new(delta, 1.0, u, g).unwrap()
    }

    #[test]
    fn ladder_pole_arithmetic() {
        let p = params(0.5, 1.0, 0.7);
        assert_relative_eq!(ladder_pole(&p, 1).unwrap(), 0.135, epsilon = 1e-15);
        assert!(matches!(ladder_pole(&p, 0), Err(Error::InvalidParams(_))));
        // u = 0 ladder is n - g^2.
        let q = params(0.5, 0.0, 0.7);
        for n in 1..6 {
            assert_relative_eq!(
                ladder_pole(&q, n).unwrap(),
                n as f64 - 0.49,
                epsilon = 1e-15
            );
        }
        assert_relative_eq!(seed_pole(&q).unwrap(), -0.49, epsilon = 1e-15);
    }

    #[test]
    fn seed_pole_value() {
        let p = params(0.5, 1.0, 0.1);
        assert_relative_eq!(seed_pole(&p).unwrap(), -0.0785343036, epsilon = 1e-9);
    }

    #[test]
    fn pole_spacing_is_constant() {
        let p = params(1.0, 1.9, 0.6);
        let s2 = 1.0 - 1.9f64 * 1.9 / 4.0;
        for n in 1..12 {
            let d = ladder_pole(&p, n + 1).unwrap() - ladder_pole(&p, n).unwrap();
            assert_relative_eq!(d, s2, epsilon = 1e-14);
        }
    }

    #[test]
    fn ratio_divergence_relations() {
        let p = params(0.5, 1.0, 0.3);
        // n = 0 coincides with the zeroth pole exactly.
        assert_eq!(ratio_divergence(&p, 0).unwrap(), seed_pole(&p).unwrap());
        // u = 0 collapses the ratio divergences onto the ladder.
        let q = params(0.5, 0.0, 0.3);
        for n in 1..5 {
            assert_relative_eq!(
                ratio_divergence(&q, n).unwrap(),
                ladder_pole(&q, n).unwrap(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn zeroth_pole_hits_the_transition_energy_at_the_critical_coupling() {
        // At the coupling where the two lowest levels cross, the zeroth
        // pole sits exactly on the crossing energy -delta/u.
        for &(delta, u) in &[(0.5, 1.0), (1.0, 1.9), (0.7, 0.4f64)] {
            let gc = ((delta / u) * (1.0 - u * u / 4.0)).sqrt();
            let p = params(delta, u, gc);
            assert_relative_eq!(seed_pole(&p).unwrap(), -delta / u, epsilon = 1e-13);
        }
    }

    #[test]
    fn g_diverges_with_opposite_signs_across_a_pole() {
        let p = params(0.5, 1.0, 0.7);
        let cfg = SolverConfig::default();
        let e1 = ladder_pole(&p, 1).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let below = evaluate(e1 - 1e-5, parity, &p, &cfg).unwrap();
            let above = evaluate(e1 + 1e-5, parity, &p, &cfg).unwrap();
            assert!(below * above < 0.0, "{parity}: {below} vs {above}");
            assert!(below.abs() > 1e2 && above.abs() > 1e2);
        }
    }

    #[test]
    fn g_is_continuous_across_a_ratio_divergence() {
        let p = params(0.5, 1.0, 0.6);
        let cfg = SolverConfig::default();
        let ew = ratio_divergence(&p, 2).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let below = evaluate(ew - 1e-7, parity, &p, &cfg).unwrap();
            let at = evaluate(ew, parity, &p, &cfg).unwrap();
            let above = evaluate(ew + 1e-7, parity, &p, &cfg).unwrap();
            let scale = at.abs().max(1.0);
            assert!((above - below).abs() < 1e-5 * scale);
            assert!((at - 0.5 * (above + below)).abs() < 1e-5 * scale);
        }
    }

    #[test]
    fn evaluation_is_invariant_under_unit_rescaling() {
        let cfg = SolverConfig::default();
        let p1 = ModelParams::new(0.5, 1.0, 1.0, 0.4).unwrap();
        let p2 = ModelParams::new(1.0, 2.0, 2.0, 0.8).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let a = evaluate(-0.3, parity, &p1, &cfg).unwrap();
            let b = evaluate(-0.6, parity, &p2, &cfg).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn evaluate_rejects_pole_neighborhoods() {
        let p = params(0.5, 1.0, 0.7);
        let cfg = SolverConfig::default();
        let e1 = ladder_pole(&p, 1).unwrap();
        assert!(matches!(
            evaluate(e1 + 1e-10, Parity::Even, &p, &cfg),
            Err(Error::NearPole { index: 1, .. })
        ));
    }

    #[test]
    fn curve_marks_breaks_at_poles_and_samples_finitely() {
        let p = params(0.5, 1.0, 0.1);
        let cfg = SolverConfig::default();
        let c = curve(&p, -1.0, 4.0, 240, &cfg).unwrap();
        let expected_breaks = c.poles.in_window(-1.0, 4.0);
        let break_energies: Vec<f64> = c
            .points
            .iter()
            .filter(|pt| pt.is_break)
            .map(|pt| pt.energy)
            .collect();
        assert_eq!(break_energies.len(), expected_breaks.len());
        for (a, b) in break_energies.iter().zip(&expected_breaks) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        // Sampled rows are finite and ordered.
        let mut last = f64::NEG_INFINITY;
        for pt in &c.points {
            assert!(pt.energy >= last - 1e-12);
            last = pt.energy;
            if !pt.is_break {
                let ge = pt.even.expect("sampled point lost its value");
                let go = pt.odd.expect("sampled point lost its value");
                assert!(ge.is_finite() && go.is_finite());
            }
        }
    }

    /// Parity-sign audit: each parity's G must vanish at that sector's ED
    /// level and stay away from zero at the opposite sector's level.
    #[test]
    fn parity_convention_matches_the_blocked_oracle() {
        let p = params(0.5, 1.0, 0.1);
        let cfg = SolverConfig::default();
        let even0 = ed::sector_energies(&p, Parity::Even, 150).unwrap()[0];
        let odd0 = ed::sector_energies(&p, Parity::Odd, 150).unwrap()[0];
        assert!(evaluate(even0, Parity::Even, &p, &cfg).unwrap().abs() < 1e-6);
        assert!(evaluate(odd0, Parity::Odd, &p, &cfg).unwrap().abs() < 1e-6);
        assert!(evaluate(even0, Parity::Odd, &p, &cfg).unwrap().abs() > 1e-3);
        assert!(evaluate(odd0, Parity::Even, &p, &cfg).unwrap().abs() > 1e-3);
    }
}
