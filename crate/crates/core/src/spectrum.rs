//! Spectral assembly: regular levels, level crossings, and exceptional
//! points.
//!
//! Three families of eigenvalues are located:
//!
//! * **regular** levels — zeros of the parity G-functions, bracketed per
//!   inter-pole segment;
//! * **crossing** (quasi-exact doubly degenerate) points — couplings where
//!   an eigenvalue lies exactly on a pole curve `E_n(g)` and the pole is
//!   lifted.  For the n-th curve these are the sign changes of the
//!   regularized numerator product `y_n * rho_n` along the curve, where
//!   `rho_n` is the cancelled-recurrence numerator of the coefficient that
//!   would divide by zero.  The subfamily with `x_n = y_n = 0` has the
//!   closed form `g_c(n) = omega sqrt((n + delta/u)(1 - u^2/4))` at energy
//!   `-omega delta / u`, which for n = 0 marks the ground-state parity
//!   crossing (a first-order transition, only present for u > 0);
//! * **exceptional nondegenerate** points — zeros in g of the pole-seeded
//!   G-function along a pole curve that are *not* crossings.  Their
//!   eigenfunctions truncate from below: the displaced-state expansion
//!   starts at order m.
//!
//! Everything takes and returns caller units; reduction by omega happens
//! internally.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::gfunction;
use crate::model::{self, ModelParams, Parity, Reduced, Seed, SolverConfig};
use crate::roots;

/// A coupling-independent slice of the parameter space; `at_coupling`
/// produces the full parameter set for one g.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelFamily {
    pub delta: f64,
    pub omega: f64,
    pub u: f64,
}

impl ModelFamily {
    pub fn new(delta: f64, omega: f64, u: f64) -> Result<Self> {
        // Validation is delegated to the parameter constructor.
        ModelParams::new(delta, omega, u, 0.0)?;
        Ok(ModelFamily { delta, omega, u })
    }

    pub fn from_params(params: &ModelParams) -> Self {
        ModelFamily {
            delta: params.delta,
            omega: params.omega,
            u: params.u,
        }
    }

    pub fn at_coupling(&self, g: f64) -> Result<ModelParams> {
        ModelParams::new(self.delta, self.omega, self.u, g)
    }

    fn reduced(&self, g: f64) -> Reduced {
        Reduced::new(self.delta / self.omega, self.u / self.omega, g / self.omega)
    }
}

/// Parity tag on an energy level; crossings carry both parities at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelParity {
    Even,
    Odd,
    Degenerate,
}

impl From<Parity> for LevelParity {
    fn from(p: Parity) -> Self {
        match p {
            Parity::Even => LevelParity::Even,
            Parity::Odd => LevelParity::Odd,
        }
    }
}

/// How a level was obtained / what analytic family it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    Regular,
    Juddian,
    ExceptionalNondegenerate,
    CollapseBranch,
}

/// One located eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyLevel {
    pub energy: f64,
    pub parity: LevelParity,
    pub g: f64,
    pub kind: LevelKind,
    /// Pole-curve index for on-curve levels (crossings, exceptional).
    pub pole_index: Option<usize>,
}

/// Output of a G-root scan in one window.
#[derive(Debug, Clone, Serialize)]
pub struct LevelScan {
    /// Located levels, ascending in energy.
    pub levels: Vec<EnergyLevel>,
    /// Energies where |G| dips below the tangency threshold without a sign
    /// change — suspected double roots that deserve a denser scan.
    pub tangencies: Vec<f64>,
}

/// Analytic spectrum at g = 0: displaced oscillators decouple into the bare
/// number basis and each level carries spin projection chi = parity *
/// (-1)^n.
fn decoupled_levels(params: &ModelParams, parity: Parity, lo: f64, hi: f64) -> Vec<EnergyLevel> {
    let (om, delta, u) = (params.omega, params.delta, params.u);
    let slope = om - 0.5 * u.abs();
    let n_cap = (((hi + 0.5 * delta.abs()) / slope).ceil().max(0.0) as usize) + 2;
    let mut levels = Vec::new();
    for n in 0..=n_cap {
        let chi = parity.sign() * if n % 2 == 0 { 1.0 } else { -1.0 };
        let e = om * n as f64 - 0.5 * chi * (delta + u * n as f64);
        if e >= lo && e <= hi {
            levels.push(EnergyLevel {
                energy: e,
                parity: parity.into(),
                g: 0.0,
                kind: LevelKind::Regular,
                pole_index: None,
            });
        }
    }
    levels.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    levels
}

/// Locates the regular levels of one parity inside `[lo, hi]` by bracketing
/// G on each inter-pole segment with `per_segment` samples.
pub fn regular_levels(
    params: &ModelParams,
    parity: Parity,
    lo: f64,
    hi: f64,
    per_segment: usize,
    cfg: &SolverConfig,
) -> Result<LevelScan> {
    params.require_displaced()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!(
            "energy window [{lo}, {hi}] is empty or not finite"
        )));
    }
    if params.g == 0.0 {
        return Ok(LevelScan {
            levels: decoupled_levels(params, parity, lo, hi),
            tangencies: Vec::new(),
        });
    }
    if per_segment < 2 {
        return Err(Error::InvalidParams(format!(
            "segment sampling needs at least 2 points, got {per_segment}"
        )));
    }

    let om = params.omega;
    let rd = params.reduced();
    let poles = gfunction::pole_set(params, lo, hi)?;
    let breaks = poles.in_window(lo, hi);

    let mut bounds = Vec::with_capacity(breaks.len() + 2);
    bounds.push(lo);
    bounds.extend(breaks.iter().copied());
    bounds.push(hi);

    let guard = 4.0 * cfg.pole_guard * om;
    let mut segments: Vec<Vec<f64>> = Vec::new();
    for win in bounds.windows(2) {
        let (mut a, mut b) = (win[0], win[1]);
        if breaks.contains(&a) {
            a += guard.min((b - a) * 0.05);
        }
        if breaks.contains(&b) {
            b -= guard.min((b - a) * 0.05);
        }
        if a < b {
            segments.push(roots::linspace(a, b, per_segment));
        }
    }

    let cfg = *cfg;
    let outcomes = exec::map(&segments, |xs| {
        let eval = |e: f64| match model::ladder(e / om, &rd, &cfg, Seed::Regular) {
            Ok(lad) if lad.converged => Some(lad.g_value(parity)),
            _ => None,
        };
        roots::scan(xs, eval, cfg.root_tol * om, cfg.dip_threshold)
    });

    let mut levels = Vec::new();
    let mut tangencies = Vec::new();
    for out in outcomes {
        for r in out.roots {
            levels.push(EnergyLevel {
                energy: r,
                parity: parity.into(),
                g: params.g,
                kind: LevelKind::Regular,
                pole_index: None,
            });
        }
        tangencies.extend(out.tangencies);
    }
    levels.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    tangencies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(LevelScan { levels, tangencies })
}

/// Energy shared by every closed-form crossing point: -omega delta / u.
/// The ground-state level crossing (n = 0) marks a first-order quantum
/// phase transition; it requires u > 0.
pub fn juddian_energy(family: &ModelFamily) -> Result<f64> {
    if family.u <= 0.0 {
        return Err(Error::NoFirstOrderTransition { u: family.u });
    }
    Ok(-family.omega * family.delta / family.u)
}

/// Closed-form coupling of the n-th-curve crossing with x_n = y_n = 0:
/// g_c(n) = omega sqrt((n + delta/u)(1 - u^2/(4 omega^2))).  Fails with
/// [`Error::NoJuddianPoint`] when the radicand is negative (u < 0 with
/// n < -delta/u) or u = 0.
pub fn juddian_coupling_n(family: &ModelFamily, n: usize) -> Result<f64> {
    let delta = family.delta / family.omega;
    let u = family.u / family.omega;
    if u == 0.0 {
        return Err(Error::NoJuddianPoint { n });
    }
    let s2 = 1.0 - 0.25 * u * u;
    let radicand = (n as f64 + delta / u) * s2;
    if radicand < 0.0 {
        return Err(Error::NoJuddianPoint { n });
    }
    Ok(family.omega * radicand.sqrt())
}

/// Coupling of the ground-state crossing; identical to
/// [`juddian_coupling_n`] at n = 0.
pub fn juddian_coupling(family: &ModelFamily) -> Result<f64> {
    juddian_coupling_n(family, 0)
}

/// Largest curve index whose closed-form crossing has already happened at
/// coupling `params.g`; -1 when none has.  Only meaningful for u > 0,
/// where the count of levels below the crossing energy is 2 (n_max + 1).
pub fn max_crossing_index(params: &ModelParams) -> Result<i64> {
    params.require_displaced()?;
    if params.u <= 0.0 {
        return Err(Error::NoFirstOrderTransition { u: params.u });
    }
    let rd = params.reduced();
    let bound = rd.w * rd.w - rd.delta / rd.u;
    Ok((bound.floor() as i64).max(-1))
}

/// Locates every coupling in `[g_lo, g_hi]` where an eigenvalue crosses the
/// n-th pole curve (n >= 1).  Sign changes of the regularized numerator
/// product `y_n * rho_n` along the curve find both root families at once;
/// the closed-form point g_c(n) is appended if a double zero made it
/// invisible to bracketing.
pub fn pole_curve_crossings(
    family: &ModelFamily,
    n: usize,
    g_lo: f64,
    g_hi: f64,
    samples: usize,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "crossing scans start at curve index 1; use the closed form for the ground crossing"
                .into(),
        ));
    }
    if family.u == 0.0 {
        // With no Stark term the ratio divergences collapse onto the pole
        // ladder and the product y_n * rho_n vanishes identically along the
        // curve; the parametrization carries no sign information there.
        return Err(Error::InvalidParams(
            "the crossing product degenerates at u = 0".into(),
        ));
    }
    ModelParams::new(family.delta, family.omega, family.u, g_hi.max(0.0))?
        .require_displaced()?;
    let lo = g_lo.max(1e-9 * family.omega);
    if !(lo < g_hi) {
        return Err(Error::InvalidParams(format!(
            "coupling window [{g_lo}, {g_hi}] is empty"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidParams(format!(
            "crossing scan needs at least 2 samples, got {samples}"
        )));
    }

    let xs = roots::linspace(lo, g_hi, samples);
    let numerator = |g: f64| -> Option<f64> {
        let rd = family.reduced(g);
        let e = rd.ladder_pole(n);
        let lad = model::ladder_to(e, &rd, cfg, Seed::Unit, n - 1).ok()?;
        let c1 = 1.0 + rd.s;
        let mut rho = rd.r_coef(n - 1, e) * lad.tt[n - 1] / c1;
        if n >= 2 {
            rho -= rd.w * rd.w * rd.z(n - 2, e) * lad.tt[n - 2];
        }
        Some(rd.y(n, e) * rho)
    };
    let out = roots::scan(&xs, numerator, cfg.root_tol * family.omega, 0.0);
    let mut roots = out.roots;

    // A tangency of the product can hide the closed-form double zero; the
    // formula recovers it.
    if let Ok(gc) = juddian_coupling_n(family, n) {
        if gc >= lo && gc <= g_hi && !roots.iter().any(|&r| (r - gc).abs() < 1e-6 * family.omega)
        {
            roots.push(gc);
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
    }
    Ok(roots)
}

/// Locates the exceptional nondegenerate points of one parity on the m-th
/// pole curve (m = 0 is the seed curve): zeros in g of the pole-seeded
/// G-function, with zeros that coincide with crossings filtered out — those
/// couplings host degenerate pairs, not truncated solutions.
pub fn exceptional_points(
    family: &ModelFamily,
    m: usize,
    parity: Parity,
    g_lo: f64,
    g_hi: f64,
    samples: usize,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    ModelParams::new(family.delta, family.omega, family.u, g_hi.max(0.0))?
        .require_displaced()?;
    let lo = g_lo.max(1e-9 * family.omega);
    if !(lo < g_hi) {
        return Err(Error::InvalidParams(format!(
            "coupling window [{g_lo}, {g_hi}] is empty"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidParams(format!(
            "exceptional scan needs at least 2 samples, got {samples}"
        )));
    }

    let xs = roots::linspace(lo, g_hi, samples);
    let g_exc = |g: f64| -> Option<f64> {
        let rd = family.reduced(g);
        let e = if m == 0 { rd.seed_pole() } else { rd.ladder_pole(m) };
        match model::ladder(e, &rd, cfg, Seed::Pole(m)) {
            Ok(lad) if lad.converged => Some(lad.g_value(parity)),
            _ => None,
        }
    };
    let out = roots::scan(&xs, g_exc, cfg.root_tol * family.omega, 0.0);

    // Couplings where the curve hosts a crossing: the pole-seeded function
    // vanishes there too, but the point is degenerate.  (At u = 0 no
    // closed-form collision family exists; zeros are reported unfiltered.)
    let collisions: Vec<f64> = if family.u == 0.0 {
        Vec::new()
    } else if m == 0 {
        juddian_coupling_n(family, 0)
            .ok()
            .filter(|&gc| gc >= lo && gc <= g_hi)
            .into_iter()
            .collect()
    } else {
        pole_curve_crossings(family, m, g_lo, g_hi, samples, cfg)?
    };

    let radius = 1e-6 * family.omega;
    Ok(out
        .roots
        .into_iter()
        .filter(|&r| !collisions.iter().any(|&c| (r - c).abs() < radius))
        .collect())
}

/// One located crossing point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossingPoint {
    pub g: f64,
    pub energy: f64,
    pub pole_index: usize,
}

/// One located exceptional nondegenerate point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExceptionalPoint {
    pub g: f64,
    pub energy: f64,
    pub pole_index: usize,
    pub parity: Parity,
}

/// Levels over a coupling grid plus the analytic point families inside the
/// same energy window.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSweep {
    pub g_grid: Vec<f64>,
    /// Per-grid-point scans, both parities merged and sorted by energy.
    pub scans: Vec<LevelScan>,
    /// Crossing points of every pole curve entering the window, ascending
    /// in (pole_index, g).
    pub crossings: Vec<CrossingPoint>,
    /// Exceptional nondegenerate points of every curve entering the window.
    pub exceptional: Vec<ExceptionalPoint>,
    /// Ground-state crossing (first-order transition) if it falls inside
    /// the coupling range; also listed in `crossings`.
    pub transition: Option<CrossingPoint>,
}

/// Index range of pole curves that intersect `[lo, hi]` for some coupling
/// in `[g_lo, g_hi]` (curve energies decrease with g).
fn curve_range(family: &ModelFamily, lo: f64, hi: f64, g_lo: f64, g_hi: f64) -> (usize, usize) {
    let om = family.omega;
    let rd_lo = family.reduced(g_lo);
    let rd_hi = family.reduced(g_hi);
    let s2 = rd_lo.s * rd_lo.s;
    // E_n(g_lo) >= lo  and  E_n(g_hi) <= hi.
    let n_min = ((lo / om - rd_lo.ladder_pole(0)) / s2).ceil().max(1.0);
    let n_max = ((hi / om - rd_hi.ladder_pole(0)) / s2).floor();
    if n_max < n_min {
        (1, 0)
    } else {
        (n_min as usize, n_max as usize)
    }
}

/// Scans the spectrum over a coupling grid: per-g regular levels in
/// `[lo, hi]`, plus the crossing and exceptional points of every pole curve
/// that enters the window.
pub fn sweep(
    family: &ModelFamily,
    g_grid: &[f64],
    lo: f64,
    hi: f64,
    per_segment: usize,
    cfg: &SolverConfig,
) -> Result<SpectrumSweep> {
    if g_grid.is_empty() {
        return Err(Error::InvalidParams("empty coupling grid".into()));
    }
    let mut g_sorted = g_grid.to_vec();
    g_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (g_min, g_max) = (g_sorted[0], *g_sorted.last().unwrap());
    family.at_coupling(g_min)?; // validates g >= 0 and the parameter set

    let scans: Vec<Result<LevelScan>> = exec::map(&g_sorted, |&g| {
        let params = family.at_coupling(g)?;
        let mut even = regular_levels(&params, Parity::Even, lo, hi, per_segment, cfg)?;
        let odd = regular_levels(&params, Parity::Odd, lo, hi, per_segment, cfg)?;
        even.levels.extend(odd.levels);
        even.tangencies.extend(odd.tangencies);
        even.levels
            .sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        even.tangencies.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(even)
    });
    let scans = scans.into_iter().collect::<Result<Vec<_>>>()?;

    let scan_samples = (4 * per_segment).clamp(64, 2048);
    let mut crossings = Vec::new();
    let mut transition = None;

    // Ground crossing from the closed form.
    if family.u > 0.0 {
        if let Ok(gc) = juddian_coupling(family) {
            let energy = juddian_energy(family)?;
            if gc >= g_min && gc <= g_max && energy >= lo && energy <= hi {
                let point = CrossingPoint { g: gc, energy, pole_index: 0 };
                transition = Some(point);
                crossings.push(point);
            }
        }
    }

    let (n_lo, n_hi) = curve_range(family, lo, hi, g_min.max(1e-9 * family.omega), g_max);
    for n in n_lo..=n_hi.min(n_lo.wrapping_add(512)) {
        if family.u == 0.0 || g_min.max(1e-9 * family.omega) >= g_max {
            break;
        }
        for g in pole_curve_crossings(family, n, g_min, g_max, scan_samples, cfg)? {
            let energy = family.reduced(g).ladder_pole(n) * family.omega;
            if energy >= lo && energy <= hi {
                crossings.push(CrossingPoint { g, energy, pole_index: n });
            }
        }
    }

    let mut exceptional = Vec::new();
    if g_min.max(1e-9 * family.omega) < g_max {
        // Seed curve (m = 0) first, if it enters the window.
        let e0_hi = family.reduced(g_min.max(1e-9 * family.omega)).seed_pole() * family.omega;
        let e0_lo = family.reduced(g_max).seed_pole() * family.omega;
        let mut curves: Vec<usize> = Vec::new();
        if e0_hi >= lo && e0_lo <= hi {
            curves.push(0);
        }
        curves.extend(n_lo..=n_hi.min(n_lo.wrapping_add(512)));
        for m in curves {
            for parity in [Parity::Even, Parity::Odd] {
                for g in exceptional_points(family, m, parity, g_min, g_max, scan_samples, cfg)? {
                    let rd = family.reduced(g);
                    let e = if m == 0 { rd.seed_pole() } else { rd.ladder_pole(m) };
                    let energy = e * family.omega;
                    if energy >= lo && energy <= hi {
                        exceptional.push(ExceptionalPoint {
                            g,
                            energy,
                            pole_index: m,
                            parity,
                        });
                    }
                }
            }
        }
    }

    crossings.sort_by(|a, b| {
        (a.pole_index, a.g)
            .partial_cmp(&(b.pole_index, b.g))
            .unwrap()
    });
    exceptional.sort_by(|a, b| {
        (a.pole_index, a.g)
            .partial_cmp(&(b.pole_index, b.g))
            .unwrap()
    });

    Ok(SpectrumSweep {
        g_grid: g_sorted,
        scans,
        crossings,
        exceptional,
        transition,
    })
}
