//! Spectral collapse at |u| = 2 omega.
//!
//! On the collapse line the displaced-oscillator construction breaks down
//! and the model maps, per spin-flip sector, onto an effective harmonic
//! oscillator in the cavity quadrature x with
//!
//! ```text
//! omega_eff(E)^2 = 1 + 2 g^2 / (delta/2 + E)          (units of omega)
//! ```
//!
//! and the self-consistency condition `E + 1 - delta/2 = (2n + 1)
//! omega_eff(E)`.  Two branches satisfy it:
//!
//! * an **upper** branch with `E > -delta/2` (omega_eff > 1), a deformed
//!   but ordinary ladder;
//! * a **lower** branch confined to `delta/2 - 1 < E < -delta/2 - 2 g^2`
//!   (0 < omega_eff < 1), whose levels accumulate at the collapse energy
//!   `E_c = -delta/2 - 2 g^2` with spacing `~ 2 g^2 (1 - delta - 2 g^2)^2 /
//!   (2n + 1)^2`.  The branch exists only below the critical coupling
//!   `g_c = sqrt((1 - delta)/2)`; above it, the discrete levels below E_c
//!   are gone and a continuum-like pileup remains.
//!
//! A negative Stark coupling (u = -2 omega) maps onto the same equations
//! with the sign of delta flipped, so the model is parametrized by a
//! *signed effective* splitting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::roots;

/// Which side of the collapse energy a level belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

/// One effective-oscillator level on the collapse line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CollapseLevel {
    pub branch: Branch,
    pub n: usize,
    /// Energy in the caller's units.
    pub energy: f64,
    /// Effective frequency in units of omega.
    pub omega_eff: f64,
}

/// Wavefunction samples of one collapse-line level over a position grid
/// (dimensionless quadrature coordinate).  `psi1`/`psi2` are the two spin
/// components, jointly normalized to unit probability on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseWavefunction {
    pub x: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi2: Vec<f64>,
}

/// Collapse-line model with a signed effective splitting (reduced by
/// omega).
#[derive(Debug, Clone, Copy)]
pub struct CollapseModel {
    /// Effective level splitting delta / omega, negative for u = -2 omega.
    pub delta: f64,
    /// Coupling g / omega.
    pub g: f64,
    /// Unit carrier for returned energies.
    pub omega: f64,
}

impl CollapseModel {
    /// Builds the effective model from full parameters; requires
    /// |u| = 2 omega exactly.  u = -2 omega flips the sign of the
    /// splitting.
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        params.require_collapse()?;
        let sign = if params.u > 0.0 { 1.0 } else { -1.0 };
        CollapseModel::new(
            sign * params.delta / params.omega,
            params.omega,
            params.g / params.omega,
        )
    }

    /// Directly from reduced quantities; `delta` is the signed effective
    /// splitting in units of omega.
    pub fn new(delta: f64, omega: f64, g: f64) -> Result<Self> {
        if !delta.is_finite() || !omega.is_finite() || !g.is_finite() || omega <= 0.0 || g < 0.0 {
            return Err(Error::InvalidParams(format!(
                "collapse model needs finite delta, omega > 0, g >= 0; got ({delta}, {omega}, {g})"
            )));
        }
        Ok(CollapseModel { delta, omega, g })
    }

    /// The accumulation energy E_c = -delta/2 - 2 g^2 (caller units).
    pub fn collapse_energy(&self) -> f64 {
        (-0.5 * self.delta - 2.0 * self.g * self.g) * self.omega
    }

    /// Largest coupling with a nonempty lower branch,
    /// g_c = omega sqrt((1 - delta)/2); beyond it the trapped levels are
    /// swallowed by the pileup at E_c.
    pub fn critical_coupling(&self) -> Result<f64> {
        if self.delta >= 1.0 {
            return Err(Error::NoCriticalCoupling { delta: self.delta });
        }
        Ok(self.omega * (0.5 * (1.0 - self.delta)).sqrt())
    }

    /// omega_eff(E) in units of omega; real on both branches.
    pub fn effective_frequency(&self, energy: f64) -> f64 {
        let e = energy / self.omega;
        (1.0 + 2.0 * self.g * self.g / (0.5 * self.delta + e)).sqrt()
    }

    fn quantization_mismatch(&self, e: f64, n: usize) -> f64 {
        // Branch-stable form of E + 1 - delta/2 - (2n+1) omega_eff(E):
        // multiply by the sign-definite sqrt of |delta/2 + E| to avoid the
        // singular frequency at the branch edges.
        let half = 0.5 * self.delta;
        let depth = half + e;
        let spring = depth + 2.0 * self.g * self.g;
        let lhs = (e + 1.0 - half) * depth.abs().sqrt();
        let rhs = (2.0 * n as f64 + 1.0) * spring.abs().sqrt();
        // On the lower branch both depth and spring are negative and the
        // square roots refer to their magnitudes; the quantization condition
        // keeps the same form.
        lhs - rhs
    }

    /// n-th level of the upper branch (E > -delta/2).
    pub fn upper_level(&self, n: usize) -> Result<CollapseLevel> {
        let edge = -0.5 * self.delta;
        let span = (2.0 * n as f64 + 3.0).powi(2) + 2.0 * self.g * self.g + 3.0;
        // Cubic clustering toward the edge, where the condition flattens.
        let m = 3000;
        let xs: Vec<f64> = (1..=m)
            .map(|k| edge + span * (k as f64 / m as f64).powi(3))
            .collect();
        let f = |e: f64| Some(self.quantization_mismatch(e, n));
        let out = roots::scan(&xs, f, 1e-14 * span, 0.0);
        let e = *out.roots.first().ok_or(Error::NoBracket {
            context: "upper collapse branch",
        })?;
        Ok(CollapseLevel {
            branch: Branch::Upper,
            n,
            energy: e * self.omega,
            omega_eff: self.effective_frequency(e * self.omega),
        })
    }

    /// First `count` levels of the upper branch.
    pub fn upper_levels(&self, count: usize) -> Result<Vec<CollapseLevel>> {
        (0..count).map(|n| self.upper_level(n)).collect()
    }

    /// n-th trapped level of the lower branch
    /// (delta/2 - 1 < E < -delta/2 - 2 g^2); requires g below the critical
    /// coupling.
    pub fn lower_level(&self, n: usize) -> Result<CollapseLevel> {
        let a = 0.5 * self.delta - 1.0;
        let b = -0.5 * self.delta - 2.0 * self.g * self.g;
        let width = b - a; // = 1 - delta - 2 g^2
        if width <= 0.0 {
            let g_max = self.critical_coupling().unwrap_or(0.0);
            return Err(Error::NoLowerBranch {
                g: self.g * self.omega,
                g_max,
            });
        }

        // The mismatch runs from negative at the left edge to positive at
        // the right edge (the frequency term vanishes there); levels with
        // large n sit exponentially close to b, so the grid is geometric
        // near that end.
        let mut xs: Vec<f64> = Vec::with_capacity(1400);
        xs.extend(roots::linspace(a + 1e-13 * width, b - 0.1 * width, 800));
        let m = 600;
        for k in 0..m {
            // Offsets from b shrinking from 0.1 width down to ~1e-14 width.
            let t = k as f64 / (m - 1) as f64;
            let off = 0.1 * width * (1e-13f64).powf(t);
            xs.push(b - off);
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let f = |e: f64| Some(self.quantization_mismatch(e, n));
        let out = roots::scan(&xs, f, 1e-15 * width, 0.0);
        let e = *out.roots.first().ok_or(Error::NoBracket {
            context: "lower collapse branch",
        })?;
        Ok(CollapseLevel {
            branch: Branch::Lower,
            n,
            energy: e * self.omega,
            omega_eff: self.effective_frequency(e * self.omega),
        })
    }

    /// First `count` trapped levels.
    pub fn lower_levels(&self, count: usize) -> Result<Vec<CollapseLevel>> {
        (0..count).map(|n| self.lower_level(n)).collect()
    }

    /// Mean photon number of a trapped level from the quadrature moments
    /// of its effective-oscillator state.  Diverges as the energy
    /// approaches the collapse energy from below.
    pub fn photon_estimate(&self, energy: f64) -> Result<f64> {
        let e = energy / self.omega;
        let g2 = self.g * self.g;
        let ec = -0.5 * self.delta - 2.0 * g2;
        let width = 1.0 - self.delta - 2.0 * g2;
        if width <= 0.0 {
            return Err(Error::NoLowerBranch {
                g: self.g * self.omega,
                g_max: self.critical_coupling().unwrap_or(0.0),
            });
        }
        if e >= ec - 1e-12 {
            return Err(Error::PhotonEstimateDiverges { energy });
        }
        Ok(g2 + 3.0 * g2 * (self.delta + 2.0 * g2 - 1.0) / (4.0 * (e - ec)) + 3.0 / (8.0 * width))
    }

    /// Samples the two-component eigenfunction of one level on a position
    /// grid (dimensionless quadrature), jointly normalized by the
    /// trapezoid rule.  Fails with [`Error::GridTooNarrow`] when the grid
    /// edges still carry probability density.
    pub fn position_wavefunction(
        &self,
        level: &CollapseLevel,
        x: &[f64],
    ) -> Result<CollapseWavefunction> {
        if x.len() < 16 || x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParams(
                "position grid must be ascending with at least 16 points".into(),
            ));
        }
        let w_eff = level.omega_eff;
        if !(w_eff > 0.0) || !w_eff.is_finite() {
            return Err(Error::InvalidParams(format!(
                "level has no normalizable eigenfunction (omega_eff = {w_eff})"
            )));
        }
        let e = level.energy / self.omega;
        let depth = 0.5 * self.delta + e;
        let scale = w_eff.sqrt();

        let hermite = |n: usize, t: f64| -> f64 {
            let (mut h0, mut h1) = (1.0, 2.0 * t);
            if n == 0 {
                return h0;
            }
            for k in 1..n {
                let h2 = 2.0 * t * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        };

        let mut psi1: Vec<f64> = Vec::with_capacity(x.len());
        let mut psi2: Vec<f64> = Vec::with_capacity(x.len());
        for &xi in x {
            let p1 = hermite(level.n, scale * xi) * (-0.5 * w_eff * xi * xi).exp();
            let p2 = if self.g == 0.0 {
                0.0
            } else {
                self.g * std::f64::consts::SQRT_2 * xi * p1 / depth
            };
            psi1.push(p1);
            psi2.push(p2);
        }

        let dens: Vec<f64> = psi1
            .iter()
            .zip(&psi2)
            .map(|(a, b)| a * a + b * b)
            .collect();
        let mut total = 0.0;
        for k in 1..x.len() {
            total += 0.5 * (dens[k] + dens[k - 1]) * (x[k] - x[k - 1]);
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidParams(
                "wavefunction amplitudes are not finite on this grid".into(),
            ));
        }
        let peak = dens.iter().cloned().fold(0.0f64, f64::max);
        let edge_mass = dens[0].max(dens[dens.len() - 1]) / peak;
        if edge_mass > 1e-8 {
            return Err(Error::GridTooNarrow { edge_mass });
        }

        let norm = total.sqrt();
        for v in psi1.iter_mut().chain(psi2.iter_mut()) {
            *v /= norm;
        }
        Ok(CollapseWavefunction {
            x: x.to_vec(),
            psi1,
            psi2,
        })
    }
}
