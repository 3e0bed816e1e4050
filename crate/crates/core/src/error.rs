//! Crate-wide error type.

use std::fmt;

/// Errors produced by the solver modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameter validation failed (sign, range, or consistency).
    InvalidParams(String),
    /// A displaced-basis routine was called with |u| >= 2 omega, where the
    /// Bogoliubov shift does not exist (collapse line or beyond).
    CollapseRegime { u_over_omega: f64 },
    /// A collapse-line routine was called with |u| != 2 omega.
    NotCollapseRegime { u_over_omega: f64 },
    /// The upper/lower coefficient ratio diverges at this energy.
    RatioPole { index: usize, energy: f64 },
    /// The requested energy is within the exclusion radius of a spectral
    /// pole of the G-function.
    NearPole { index: usize, energy: f64, pole: f64 },
    /// The coefficient series failed to reach the tail tolerance.
    SeriesNotConverged { order: usize, energy: f64 },
    /// No first-order transition exists for this sign of the Stark coupling.
    NoFirstOrderTransition { u: f64 },
    /// No real degeneracy coupling exists for this crossing index.
    NoJuddianPoint { n: usize },
    /// The trapped branch is empty: the coupling is at or past its critical
    /// value.
    NoLowerBranch { g: f64, g_max: f64 },
    /// No finite critical coupling exists (the branch interval is empty for
    /// every coupling).
    NoCriticalCoupling { delta: f64 },
    /// A bracketing scan found no sign change.
    NoBracket { context: &'static str },
    /// The photon-number estimate diverges at the collapse energy.
    PhotonEstimateDiverges { energy: f64 },
    /// The requested basis cannot hold the state to the normalization
    /// threshold.
    BasisTooSmall { deficit: f64, threshold: f64 },
    /// The position grid does not contain the wavefunction support.
    GridTooNarrow { edge_mass: f64 },
    /// The requested truncation exceeds the configured limit.
    DimensionTooLarge { requested: usize, limit: usize },
    /// An eigensolver failed to converge.
    EigenFailed(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::CollapseRegime { u_over_omega } => write!(
                f,
                "|u|/omega = {} >= 2: displaced-basis solver undefined on or past the collapse line",
                u_over_omega.abs()
            ),
            Error::NotCollapseRegime { u_over_omega } => write!(
                f,
                "|u|/omega = {} != 2: parameters are not on a spectral-collapse line",
                u_over_omega.abs()
            ),
            Error::RatioPole { index, energy } => write!(
                f,
                "coefficient ratio diverges near its pole {index} at E = {energy}"
            ),
            Error::NearPole { index, energy, pole } => write!(
                f,
                "E = {energy} lies within the exclusion radius of pole {index} at {pole}"
            ),
            Error::SeriesNotConverged { order, energy } => write!(
                f,
                "coefficient series not converged after {order} terms at E = {energy}"
            ),
            Error::NoFirstOrderTransition { u } => write!(
                f,
                "no first-order transition for Stark coupling u = {u} (requires u > 0)"
            ),
            Error::NoJuddianPoint { n } => {
                write!(f, "no real degeneracy coupling for crossing index {n}")
            }
            Error::NoLowerBranch { g, g_max } => write!(
                f,
                "no trapped branch at g = {g}: branch closes at g = {g_max}"
            ),
            Error::NoCriticalCoupling { delta } => write!(
                f,
                "no critical coupling for effective splitting delta = {delta}"
            ),
            Error::NoBracket { context } => write!(f, "no sign change bracketed ({context})"),
            Error::PhotonEstimateDiverges { energy } => write!(
                f,
                "photon-number estimate diverges at the collapse energy {energy}"
            ),
            Error::BasisTooSmall { deficit, threshold } => write!(
                f,
                "basis too small: norm deficit {deficit:.3e} exceeds threshold {threshold:.3e}"
            ),
            Error::GridTooNarrow { edge_mass } => write!(
                f,
                "grid too narrow: relative edge mass {edge_mass:.3e}"
            ),
            Error::DimensionTooLarge { requested, limit } => write!(
                f,
                "truncation {requested} exceeds the configured limit {limit}"
            ),
            Error::EigenFailed(what) => write!(f, "eigensolver failed: {what}"),
        }
    }
}

impl std::error::Error for Error {}
