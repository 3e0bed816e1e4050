//! Model parameters and the displaced-basis coefficient recurrence.
//!
//! In the spin frame where the qubit couples through `sigma_z`, the quantum
//! Rabi-Stark Hamiltonian reads (hbar = 1, `a'` the creation operator)
//!
//! ```text
//! H = omega a'a + g (a + a') sigma_z - (delta + u a'a) sigma_x / 2 ,
//! ```
//!
//! i.e. a cavity of frequency `omega`, a qubit of splitting `delta`, a dipole
//! coupling `g`, and a nonlinear Stark coupling `u` that shifts the qubit
//! splitting per photon.  All internal arithmetic is carried out in units of
//! `omega`; public entry points accept and return quantities in the caller's
//! units.
//!
//! For |u| < 2 omega the oscillator part of each spin channel is brought to
//! diagonal form by a displacement `A = a + w` with
//!
//! ```text
//! w = (g/omega) / sqrt(1 - (u / 2 omega)^2) .
//! ```
//!
//! Eigenstates then expand over the displaced number states `|n>_A` with a
//! lower-component amplitude `f_n` and an upper-component amplitude
//! `e_n = Omega_n f_n`.  Writing `s = sqrt(1 - u^2/4)` (reduced units) the
//! ratio is a quotient of two affine functions of the energy,
//!
//! ```text
//! Omega_m = x_m / y_m ,
//! x_m = -delta - u (s m - g^2/s + E) / (1 + s) ,
//! y_m = 2 (E - (s m - g^2/s - u delta / (4 (1 + s)))) ,
//! ```
//!
//! and the `f_n` obey a three-term recurrence whose raw coefficients contain
//! the difference `u w + 2 (g - w) Omega_m`.  That form is numerically
//! hostile: it degenerates to 0/0 at u = 0 and loses precision for small u.
//! This module instead carries the rescaled variables `tt_n = f_n w^n / y_n`,
//! for which the same recurrence takes the analytically cancelled form
//!
//! ```text
//! n z_n tt_n = R_{n-1} tt_{n-1} / (1 + s) - w^2 z_{n-2} tt_{n-2} ,
//! z_m = 4 (E - (s^2 m - u delta / 4 - g^2)) / (1 + s) ,
//! R_m = (delta + u (m + w^2))^2 / 2 - 2 (Gam_m - E)^2 + 8 g^4 / s^2 ,
//! Gam_m = m + w^2 ,
//! ```
//!
//! which is uniformly valid for all |u| < 2 including u = 0, where it
//! reduces to the linear-Rabi recurrence exactly.  The factor `z_m` vanishes
//! precisely on the m-th spectral pole, so pole proximity is detected from
//! `z` itself rather than from a catastrophic cancellation.

use serde::Serialize;

use crate::error::{Error, Result};

/// Physical parameters of the model, in the caller's units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Qubit splitting (> 0).
    pub delta: f64,
    /// Cavity frequency (> 0).
    pub omega: f64,
    /// Nonlinear Stark coupling; |u| <= 2 omega.
    pub u: f64,
    /// Dipole coupling (>= 0).
    pub g: f64,
}

impl ModelParams {
    /// General constructor; accepts the whole supported window |u| <= 2 omega.
    pub fn new(delta: f64, omega: f64, u: f64, g: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "qubit splitting must be positive, got {delta}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!(
                "cavity frequency must be positive, got {omega}"
            )));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidParams(format!(
                "dipole coupling must be non-negative, got {g}"
            )));
        }
        if !u.is_finite() || u.abs() > 2.0 * omega {
            return Err(Error::InvalidParams(format!(
                "Stark coupling must satisfy |u| <= 2 omega, got u = {u}, omega = {omega}"
            )));
        }
        Ok(ModelParams { delta, omega, u, g })
    }

    /// Constructor for the displaced-basis (series) pathway: |u| < 2 omega.
    pub fn displaced(delta: f64, omega: f64, u: f64, g: f64) -> Result<Self> {
        let p = Self::new(delta, omega, u, g)?;
        p.require_displaced()?;
        Ok(p)
    }

    /// Constructor for the collapse pathway: |u| = 2 omega exactly.
    pub fn collapse(delta: f64, omega: f64, u: f64, g: f64) -> Result<Self> {
        let p = Self::new(delta, omega, u, g)?;
        p.require_collapse()?;
        Ok(p)
    }

    /// Error unless |u| < 2 omega.
    pub fn require_displaced(&self) -> Result<()> {
        let r = self.u / self.omega;
        if r.abs() >= 2.0 {
            return Err(Error::CollapseRegime { u_over_omega: r });
        }
        Ok(())
    }

    /// Error unless |u| = 2 omega.
    pub fn require_collapse(&self) -> Result<()> {
        let r = self.u / self.omega;
        if r.abs() != 2.0 {
            return Err(Error::NotCollapseRegime { u_over_omega: r });
        }
        Ok(())
    }

    /// Parameters divided through by the cavity frequency.
    pub(crate) fn reduced(&self) -> Reduced {
        Reduced::new(
            self.delta / self.omega,
            self.u / self.omega,
            self.g / self.omega,
        )
    }
}

/// Parity quantum number of the rotated-frame symmetry
/// `Pi = (-1)^(a'a) sigma_x`; +1 corresponds to even total excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// The eigenvalue of the parity operator: +1 or -1.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Tolerances and cutoffs shared by the series and root-finding routines.
/// Energies inside the config are understood in units of `omega`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverConfig {
    /// Series tail tolerance: the expansion stops once two consecutive
    /// scaled terms fall below this value.
    pub series_tol: f64,
    /// Hard cap on the expansion order.
    pub max_order: usize,
    /// Exclusion radius around spectral poles; evaluations closer than this
    /// report `Error::NearPole` instead of a meaningless number.
    pub pole_guard: f64,
    /// Bisection interval tolerance for root refinement.
    pub root_tol: f64,
    /// |G| below this at a sample without an adjacent sign change is
    /// reported as a tangency candidate (possible grazing double root).
    pub dip_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            series_tol: 1e-14,
            max_order: 400,
            pole_guard: 1e-8,
            root_tol: 1e-10,
            dip_threshold: 1e-9,
        }
    }
}

/// Parameters in units of the cavity frequency, with the derived constants
/// cached.  All closed-form ingredients of the recurrence live here.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reduced {
    pub delta: f64,
    pub u: f64,
    pub g: f64,
    /// sqrt(1 - u^2/4)
    pub s: f64,
    /// Bogoliubov shift g/s.
    pub w: f64,
}

impl Reduced {
    pub fn new(delta: f64, u: f64, g: f64) -> Self {
        let s = (1.0 - 0.25 * u * u).sqrt();
        Reduced { delta, u, g, s, w: g / s }
    }

    /// g w = g^2 / s.
    #[inline]
    pub fn gw(&self) -> f64 {
        self.g * self.g / self.s
    }

    /// Spectral pole ladder E_m = s^2 m - u delta / 4 - g^2.  For m = 0 this
    /// is an algebraic ingredient of the recurrence (`z_0`), not a pole of
    /// the G-function; the actual zeroth pole is [`Reduced::seed_pole`].
    #[inline]
    pub fn ladder_pole(&self, m: usize) -> f64 {
        self.s * self.s * m as f64 - 0.25 * self.u * self.delta - self.g * self.g
    }

    /// Zeroth pole of the G-function, where the seed coefficient ratio
    /// diverges: E_0 = -g^2/s - u delta / (4 (1 + s)).
    #[inline]
    pub fn seed_pole(&self) -> f64 {
        -self.gw() - 0.25 * self.u * self.delta / (1.0 + self.s)
    }

    /// Divergence energy of the coefficient ratio Omega_m:
    /// E = s m - g^2/s - u delta / (4 (1 + s)).  For m = 0 it coincides with
    /// the zeroth pole.
    #[inline]
    pub fn ratio_pole(&self, m: usize) -> f64 {
        self.s * m as f64 - self.gw() - 0.25 * self.u * self.delta / (1.0 + self.s)
    }

    /// Numerator of Omega_m.
    #[inline]
    pub fn x(&self, m: usize, e: f64) -> f64 {
        -self.delta - self.u / (1.0 + self.s) * (self.s * m as f64 - self.gw() + e)
    }

    /// Denominator of Omega_m.
    #[inline]
    pub fn y(&self, m: usize, e: f64) -> f64 {
        2.0 * (e - self.ratio_pole(m))
    }

    /// Pole factor z_m = 4 (E - ladder_pole(m)) / (1 + s); vanishes exactly
    /// on the m-th spectral pole.
    #[inline]
    pub fn z(&self, m: usize, e: f64) -> f64 {
        4.0 * (e - self.ladder_pole(m)) / (1.0 + self.s)
    }

    /// Coupling coefficient R_m of the cancelled recurrence.
    #[inline]
    pub fn r_coef(&self, m: usize, e: f64) -> f64 {
        let gam = m as f64 + self.w * self.w;
        let d = self.delta + self.u * gam;
        let gw = self.gw();
        // (Gam - E)^2 - (2 g w)^2 written as the product of the two factors
        // p = Gam - E - 2gw and q = Gam - E + 2gw.
        let p = gam - e - 2.0 * gw;
        let q = gam - e + 2.0 * gw;
        0.5 * d * d - 2.0 * p * q
    }
}

/// Seeding of the coefficient ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Seed {
    /// Regular expansion: f_0 = 1, i.e. tt_0 = 1/y_0.
    Regular,
    /// Unit seed tt_0 = 1 (regular recurrence with a different overall
    /// scale); used by residual scans where y_0 may vanish along the path.
    Unit,
    /// Expansion seeded on pole m: tt_{m} = 1 and all lower orders zero.
    /// The energy must be the exact pole energy.
    Pole(usize),
}

/// Raw output of the recurrence in the rescaled variables.
#[derive(Debug, Clone)]
pub(crate) struct Ladder {
    pub tt: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub order: usize,
    pub converged: bool,
}

impl Ladder {
    /// Parity G-function value: sum over (x_n -+ y_n) tt_n, the minus sign
    /// belonging to even parity.
    pub fn g_value(&self, parity: Parity) -> f64 {
        let sign = -parity.sign();
        let mut acc = 0.0;
        for n in 0..=self.order {
            acc += (self.x[n] + sign * self.y[n]) * self.tt[n];
        }
        acc
    }
}

/// Runs the cancelled recurrence at reduced energy `e`.
pub(crate) fn ladder(e: f64, rd: &Reduced, cfg: &SolverConfig, seed: Seed) -> Result<Ladder> {
    ladder_impl(e, rd, cfg, seed, None)
}

/// Like [`ladder`] but stops after computing order `last` regardless of
/// convergence.  Used by residual evaluations that need the terms *below*
/// an order whose own pole factor vanishes.
pub(crate) fn ladder_to(
    e: f64,
    rd: &Reduced,
    cfg: &SolverConfig,
    seed: Seed,
    last: usize,
) -> Result<Ladder> {
    ladder_impl(e, rd, cfg, seed, Some(last))
}

fn ladder_impl(
    e: f64,
    rd: &Reduced,
    cfg: &SolverConfig,
    seed: Seed,
    last: Option<usize>,
) -> Result<Ladder> {
    if !(rd.g > 0.0) {
        return Err(Error::InvalidParams(
            "coefficient series requires g > 0; the g = 0 spectrum is analytic".into(),
        ));
    }
    let s = rd.s;
    let c1 = 1.0 + s;
    let w2 = rd.w * rd.w;

    let start = match seed {
        Seed::Regular | Seed::Unit => 0,
        Seed::Pole(m) => m,
    };
    let skip_check = match seed {
        Seed::Pole(m) => Some(m),
        _ => None,
    };

    // The seed coefficient of the regular expansion divides by y_0, which
    // vanishes at the zeroth pole.
    if seed == Seed::Regular {
        let p0 = rd.seed_pole();
        if (e - p0).abs() < cfg.pole_guard {
            return Err(Error::NearPole { index: 0, energy: e, pole: p0 });
        }
    }

    let cap = match last {
        Some(l) => l,
        None => cfg.max_order.max(start + 2),
    };
    let mut tt = vec![0.0; start + 1];
    let mut xs: Vec<f64> = (0..=start).map(|m| rd.x(m, e)).collect();
    let mut ys: Vec<f64> = (0..=start).map(|m| rd.y(m, e)).collect();
    tt[start] = match seed {
        Seed::Regular => 1.0 / ys[0],
        Seed::Unit | Seed::Pole(_) => 1.0,
    };

    let mut max_term: f64 = 1.0;
    let mut small_run = 0usize;
    let mut order = start;
    let mut converged = false;

    for n in (start + 1)..=cap {
        if skip_check != Some(n) {
            let pn = rd.ladder_pole(n);
            if (e - pn).abs() < cfg.pole_guard {
                return Err(Error::NearPole { index: n, energy: e, pole: pn });
            }
        }
        let mut num = rd.r_coef(n - 1, e) * tt[n - 1] / c1;
        if n >= start + 2 {
            num -= w2 * rd.z(n - 2, e) * tt[n - 2];
        }
        let t_next = num / (n as f64 * rd.z(n, e));
        tt.push(t_next);
        xs.push(rd.x(n, e));
        ys.push(rd.y(n, e));
        order = n;

        let t_abs = (ys[n] * t_next).abs();
        let e_abs = (xs[n] * t_next).abs();
        let m = t_abs.max(e_abs);
        max_term = max_term.max(m);
        if m < cfg.series_tol * max_term.max(1.0) {
            small_run += 1;
            if small_run >= 2 && n >= start + 2 {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }

    Ok(Ladder { tt, x: xs, y: ys, order, converged })
}

/// The expansion coefficients of one energy over displaced number states.
///
/// `lower[n] = f_n w^n` and `upper[n] = e_n w^n` are the scaled amplitudes
/// of the lower and upper spin component on the n-th displaced state; the
/// scaling keeps both tails bounded.  The regular normalization fixes
/// `lower[0] = 1`.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    /// Energy (caller's units) at which the series was evaluated.
    pub energy: f64,
    /// Bogoliubov shift w.
    pub shift: f64,
    /// Index of the last computed term.
    pub order: usize,
    /// Whether the tail reached the configured tolerance.
    pub converged: bool,
    /// Scaled lower-component amplitudes f_n w^n.
    pub lower: Vec<f64>,
    /// Scaled upper-component amplitudes e_n w^n.
    pub upper: Vec<f64>,
}

impl CoefficientSeries {
    /// The parity sum whose zeros are the regular spectrum: for even parity
    /// `sum (upper_n - lower_n)`, for odd `sum (upper_n + lower_n)`.
    pub fn parity_sum(&self, parity: Parity) -> f64 {
        let sign = -parity.sign();
        let mut acc = 0.0;
        for n in 0..=self.order {
            acc += self.upper[n] + sign * self.lower[n];
        }
        acc
    }
}

/// Bogoliubov shift `w` of the displaced mode, in units of omega.
pub fn bogoliubov_shift(params: &ModelParams) -> Result<f64> {
    params.require_displaced()?;
    Ok(params.reduced().w)
}

/// Ratio Omega_m = e_m / f_m between the upper and lower expansion
/// coefficients at energy `energy` (caller's units).
///
/// Errors with [`Error::RatioPole`] within 1e-12 omega of the ratio's
/// divergence energy.
pub fn coefficient_ratio(m: usize, energy: f64, params: &ModelParams) -> Result<f64> {
    params.require_displaced()?;
    let rd = params.reduced();
    let e = energy / params.omega;
    if (e - rd.ratio_pole(m)).abs() < 1e-12 {
        return Err(Error::RatioPole { index: m, energy });
    }
    Ok(rd.x(m, e) / rd.y(m, e))
}

/// Computes the displaced-basis expansion coefficients at `energy`
/// (caller's units) with the regular normalization f_0 = 1.
///
/// Non-convergence is reported through the `converged` flag, not an error;
/// energies within `cfg.pole_guard` of a spectral pole error with
/// [`Error::NearPole`].
pub fn coefficient_series(
    energy: f64,
    params: &ModelParams,
    cfg: &SolverConfig,
) -> Result<CoefficientSeries> {
    params.require_displaced()?;
    let rd = params.reduced();
    let lad = ladder(energy / params.omega, &rd, cfg, Seed::Regular)?;
    Ok(series_from_ladder(energy, &rd, &lad))
}

pub(crate) fn series_from_ladder(energy: f64, rd: &Reduced, lad: &Ladder) -> CoefficientSeries {
    let lower: Vec<f64> = (0..=lad.order).map(|n| lad.y[n] * lad.tt[n]).collect();
    let upper: Vec<f64> = (0..=lad.order).map(|n| lad.x[n] * lad.tt[n]).collect();
    CoefficientSeries {
        energy,
        shift: rd.w,
        order: lad.order,
        converged: lad.converged,
        lower,
        upper,
    }
}

/// A normalized eigenvector candidate over the bare Fock basis, in the
/// rotated spin frame (`upper`/`lower` are the sigma_z = +1/-1 components).
#[derive(Debug, Clone)]
pub struct FockState {
    pub energy: f64,
    pub parity: Parity,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// Relative weight found in the last 5% of the basis before
    /// normalization; a large value means `dim` was too small.
    pub norm_deficit: f64,
}

/// Norm-deficit threshold above which [`fock_expansion`] refuses to return
/// a state.
pub const FOCK_DEFICIT_THRESHOLD: f64 = 1e-8;

/// Converts a coefficient series into bare-Fock-basis amplitudes, projects
/// onto the requested parity sector and normalizes.
///
/// The displaced-state sum is truncated where forward-recurrence noise
/// overtakes the decaying true amplitudes (the first growth of the scaled
/// term magnitudes).  Errors with [`Error::BasisTooSmall`] when `dim` does
/// not capture the state to [`FOCK_DEFICIT_THRESHOLD`].
pub fn fock_expansion(
    series: &CoefficientSeries,
    parity: Parity,
    dim: usize,
) -> Result<FockState> {
    if dim < 4 {
        return Err(Error::InvalidParams(format!(
            "Fock dimension must be at least 4, got {dim}"
        )));
    }
    let w = series.shift;
    if !(w > 0.0) {
        return Err(Error::InvalidParams(
            "Fock expansion requires a positive displacement".into(),
        ));
    }

    // Recover the coefficients over the orthonormal displaced states:
    // the series stores f_n * w^n, while the n-th normalized displaced
    // state enters the eigenvector with weight sqrt(n!) * f_n (e_n for the
    // other spin component).  The scan stops where the (noise-dominated)
    // magnitudes start to grow.
    let mut cf = Vec::with_capacity(series.order + 1);
    let mut ce = Vec::with_capacity(series.order + 1);
    let mut scale = 1.0; // sqrt(n!) / w^n
    let mut mags = Vec::with_capacity(series.order + 1);
    for n in 0..=series.order {
        if n > 0 {
            scale *= (n as f64).sqrt() / w;
        }
        let fv = series.lower[n] * scale;
        let ev = series.upper[n] * scale;
        if !fv.is_finite() || !ev.is_finite() {
            break;
        }
        cf.push(fv);
        ce.push(ev);
        mags.push(fv.abs().max(ev.abs()));
    }
    // Truncate at the global minimum of the magnitudes (noise takeover).
    let mut n_cut = mags.len() - 1;
    let mut best = f64::INFINITY;
    for (n, &m) in mags.iter().enumerate() {
        if m < best {
            best = m;
            n_cut = n;
        }
    }

    // Displaced number states |n>_A over the bare basis, built by the
    // ladder (a' + w)/sqrt(n+1) from |0>_A.
    let mut phi = vec![0.0; dim];
    phi[0] = (-0.5 * w * w).exp();
    for k in 1..dim {
        phi[k] = phi[k - 1] * (-w) / (k as f64).sqrt();
    }
    let mut upper = vec![0.0; dim];
    let mut lower = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    for n in 0..=n_cut {
        for k in 0..dim {
            upper[k] += ce[n] * phi[k];
            lower[k] += cf[n] * phi[k];
        }
        if n == n_cut {
            break;
        }
        let norm = 1.0 / ((n + 1) as f64).sqrt();
        next[0] = w * phi[0] * norm;
        for k in 1..dim {
            next[k] = ((k as f64).sqrt() * phi[k - 1] + w * phi[k]) * norm;
        }
        std::mem::swap(&mut phi, &mut next);
    }

    // Project onto the parity sector: Pi (u, l)_k = ((-1)^k l, (-1)^k u)_k.
    let p = parity.sign();
    for k in 0..dim {
        let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (uk, lk) = (upper[k], lower[k]);
        upper[k] = 0.5 * (uk + p * sk * lk);
        lower[k] = 0.5 * (lk + p * sk * uk);
    }

    let total: f64 = upper.iter().chain(lower.iter()).map(|v| v * v).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::EigenFailed("parity projection annihilated the state"));
    }
    let tail_start = dim - (dim / 20).max(3).min(dim - 1);
    let tail: f64 = upper[tail_start..]
        .iter()
        .chain(lower[tail_start..].iter())
        .map(|v| v * v)
        .sum();
    let deficit = tail / total;
    if deficit > FOCK_DEFICIT_THRESHOLD {
        return Err(Error::BasisTooSmall {
            deficit,
            threshold: FOCK_DEFICIT_THRESHOLD,
        });
    }
    let inv = 1.0 / total.sqrt();
    for v in upper.iter_mut().chain(lower.iter_mut()) {
        *v *= inv;
    }

    Ok(FockState {
        energy: series.energy,
        parity,
        upper,
        lower,
        norm_deficit: deficit,
    })
}
