//! Spectral methods for the quantum Rabi-Stark model: a qubit coupled to a
//! single cavity mode through a dipole term and a nonlinear Stark term,
//!
//! ```text
//! H = delta/2 sigma_z + omega a'a + g (a + a') sigma_x + u/2 sigma_z a'a .
//! ```
//!
//! The Stark coupling `u` makes the qubit splitting photon-number dependent
//! and reshapes the spectrum drastically: for 0 < |u| < 2 omega the spectrum
//! stays discrete but acquires first-order level crossings, while at
//! |u| = 2 omega part of the spectrum collapses towards an accumulation
//! energy.  This crate covers both regimes:
//!
//! * [`model`] — parameters, the displaced-basis coefficient recurrence in a
//!   numerically stable form, and bare-basis eigenvector reconstruction.
//! * [`gfunction`] — the transcendental G-function whose zeros are the
//!   regular spectrum, plus its pole ladder.
//! * [`spectrum`] — root scans, degeneracy (crossing) machinery, exceptional
//!   (on-pole) solutions and full spectrum-versus-coupling sweeps.
//! * [`ed`] — truncated-basis exact diagonalization, the independent
//!   cross-check for everything else; parity-blocked tridiagonal fast path.
//! * [`collapse`] — the |u| = 2 omega line: collapse energy, both analytic
//!   level branches, photon-number estimates and position-space
//!   wavefunctions.
//! * [`validation`] — the cross-method consistency suite used by the CLI.
//!
//! Heavy scans are data-parallel through [`exec`] when the default
//! `parallel` feature is enabled, with an identical sequential fallback
//! otherwise.  Computations are deterministic: the same inputs produce the
//! same bits regardless of thread count.
//!
//! # Example
//!
//! ```
//! use rabi_stark::model::{ModelParams, Parity, SolverConfig};
//! use rabi_stark::spectrum;
//!
//! let params = ModelParams::displaced(0.5, 1.0, 1.0, 0.1).unwrap();
//! let cfg = SolverConfig::default();
//! let scan = spectrum::regular_levels(&params, Parity::Even, -1.0, 2.0, 64, &cfg).unwrap();
//! let ground = scan.levels.first().unwrap();
//! assert!((ground.energy + 0.25).abs() < 0.05); // near -delta/2 at weak coupling
//! ```

// Parameter guards are written `!(x > 0.0)` rather than `x <= 0.0` on
// purpose: the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collapse;
pub mod ed;
pub mod error;
pub mod exec;
pub mod gfunction;
pub mod model;
pub mod roots;
pub mod spectrum;
pub mod tridiag;
pub mod validation;

pub use error::{Error, Result};
pub use model::{CoefficientSeries, FockState, ModelParams, Parity, SolverConfig};
