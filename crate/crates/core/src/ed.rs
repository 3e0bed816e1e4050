//! Truncated-basis exact diagonalization.
//!
//! Reference spectra for everything the series solver produces.  The
//! Hamiltonian conserves the joint spin-boson parity sigma_x (-1)^{a^dag a}
//! (in the frame where the coupling is diagonal in spin), so in the basis
//! |n, chi_n> with chi_n = p (-1)^n each parity sector is a real symmetric
//! *tridiagonal* matrix:
//!
//!   d_n = omega n - p (-1)^n (Delta + U n) / 2,     e_n = g sqrt(n + 1).
//!
//! Sector mode diagonalizes the two chains directly (O(n^2) eigenvalues via
//! the QL iteration, selected eigenvectors via inverse iteration), which
//! comfortably reaches truncations of a few thousand photons.  Full mode
//! builds the dense 2(n_tr+1)-dimensional matrix and is kept mostly as an
//! independent cross-check of the sector reduction.
//!
//! Truncation always bounds the spectrum from above: growing `n_tr` can only
//! lower each eigenvalue (Cauchy interlacing), which is what makes the
//! convergence sweeps in the collapse regime meaningful.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::tridiag;

/// Options for [`diagonalize`].
#[derive(Debug, Clone)]
pub struct EdOptions {
    /// Use the parity-blocked tridiagonal form (default) instead of the
    /// dense full basis.
    pub sector: bool,
    /// Also compute eigenvectors (and with them photon numbers).  In sector
    /// mode this switches the QL iteration to its accumulating variant,
    /// which is only sensible for moderate truncations; use
    /// [`nearest_states`] when only a few vectors of a large matrix are
    /// needed.
    pub vectors: bool,
    /// Largest matrix dimension this call may diagonalize.
    pub limit: usize,
}

impl Default for EdOptions {
    fn default() -> Self {
        EdOptions {
            sector: true,
            vectors: false,
            limit: 4096,
        }
    }
}

/// Merged spectrum of a truncated Hamiltonian.
#[derive(Debug, Clone, Serialize)]
pub struct EdResult {
    /// Fock truncation: occupations 0..=n_tr are kept.
    pub n_tr: usize,
    /// All eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Parity of each state: exactly +-1 in sector mode, the expectation
    /// value of sigma_x (-1)^n in full mode (degenerate pairs may mix).
    pub parities: Vec<f64>,
    /// Mean photon number per state, when vectors were computed.
    pub photon: Option<Vec<f64>>,
    /// Eigenvectors (sector basis in sector mode, full basis otherwise).
    #[serde(skip)]
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Energy, parity, and photon number of one selected state.
#[derive(Debug, Clone, Serialize)]
pub struct StateInfo {
    pub energy: f64,
    pub parity: f64,
    pub photon: f64,
}

/// Diagonal and off-diagonal of one parity chain.
pub fn sector_matrix(params: &ModelParams, parity: Parity, n_tr: usize) -> (Vec<f64>, Vec<f64>) {
    let p = parity.sign();
    let diag: Vec<f64> = (0..=n_tr)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            params.omega * n as f64 - p * sign * (params.delta + params.u * n as f64) / 2.0
        })
        .collect();
    let off: Vec<f64> = (0..n_tr).map(|n| params.g * ((n + 1) as f64).sqrt()).collect();
    (diag, off)
}

/// Dense Hamiltonian on spin (x) Fock(0..=n_tr); rows 0..=n_tr carry the
/// spin component along the coupling axis, the rest the opposite one.
pub fn hamiltonian_matrix(params: &ModelParams, n_tr: usize) -> DMatrix<f64> {
    let k = n_tr + 1;
    let mut h = DMatrix::zeros(2 * k, 2 * k);
    for n in 0..k {
        let fock = params.omega * n as f64;
        h[(n, n)] = fock;
        h[(k + n, k + n)] = fock;
        // Spin-flip term -(Delta + U n)/2, diagonal in the photon number.
        let flip = -(params.delta + params.u * n as f64) / 2.0;
        h[(n, k + n)] = flip;
        h[(k + n, n)] = flip;
        if n + 1 < k {
            let hop = params.g * ((n + 1) as f64).sqrt();
            h[(n, n + 1)] = hop;
            h[(n + 1, n)] = hop;
            h[(k + n, k + n + 1)] = -hop;
            h[(k + n + 1, k + n)] = -hop;
        }
    }
    h
}

/// Parity expectation sigma_x (-1)^n of a full-basis vector.
pub fn parity_expectation(full_vec: &[f64]) -> f64 {
    let k = full_vec.len() / 2;
    let mut acc = 0.0;
    for n in 0..k {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += 2.0 * sign * full_vec[n] * full_vec[k + n];
    }
    acc
}

fn photon_blocked(v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(n, x)| n as f64 * x * x).sum()
}

fn photon_full(v: &[f64]) -> f64 {
    let k = v.len() / 2;
    (0..k)
        .map(|n| n as f64 * (v[n] * v[n] + v[k + n] * v[k + n]))
        .sum()
}

/// Diagonalizes the truncated Hamiltonian.
pub fn diagonalize(params: &ModelParams, n_tr: usize, opts: &EdOptions) -> Result<EdResult> {
    let dim = if opts.sector { n_tr + 1 } else { 2 * (n_tr + 1) };
    if dim > opts.limit {
        return Err(Error::DimensionTooLarge {
            requested: dim,
            limit: opts.limit,
        });
    }
    if opts.sector {
        diagonalize_sectors(params, n_tr, opts.vectors)
    } else {
        diagonalize_full(params, n_tr, opts.vectors)
    }
}

fn diagonalize_sectors(params: &ModelParams, n_tr: usize, want_vectors: bool) -> Result<EdResult> {
    // (energy, parity sign, photon, vector)
    let mut states: Vec<(f64, f64, f64, Option<Vec<f64>>)> = Vec::with_capacity(2 * (n_tr + 1));
    for parity in [Parity::Even, Parity::Odd] {
        let (diag, off) = sector_matrix(params, parity, n_tr);
        if want_vectors {
            let (vals, vecs) = tridiag::eigen_decomposition(&diag, &off)?;
            for (v, vec) in vals.into_iter().zip(vecs) {
                states.push((v, parity.sign(), photon_blocked(&vec), Some(vec)));
            }
        } else {
            for v in tridiag::eigenvalues(&diag, &off)? {
                states.push((v, parity.sign(), 0.0, None));
            }
        }
    }
    // Ascending energy; even before odd on exact ties for determinism.
    states.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(b.1.partial_cmp(&a.1).unwrap())
    });
    let energies: Vec<f64> = states.iter().map(|s| s.0).collect();
    let parities: Vec<f64> = states.iter().map(|s| s.1).collect();
    let photon = if want_vectors {
        Some(states.iter().map(|s| s.2).collect())
    } else {
        None
    };
    let vectors = if want_vectors {
        Some(states.into_iter().map(|s| s.3.unwrap()).collect())
    } else {
        None
    };
    Ok(EdResult {
        n_tr,
        energies,
        parities,
        photon,
        vectors,
    })
}

fn diagonalize_full(params: &ModelParams, n_tr: usize, want_vectors: bool) -> Result<EdResult> {
    let h = hamiltonian_matrix(params, n_tr);
    let eig = h.symmetric_eigen();
    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut energies = Vec::with_capacity(dim);
    let mut parities = Vec::with_capacity(dim);
    let mut photons = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(if want_vectors { dim } else { 0 });
    for &j in &order {
        let col: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        energies.push(eig.eigenvalues[j]);
        parities.push(parity_expectation(&col));
        photons.push(photon_full(&col));
        if want_vectors {
            vectors.push(col);
        }
    }
    Ok(EdResult {
        n_tr,
        energies,
        parities,
        photon: Some(photons),
        vectors: if want_vectors { Some(vectors) } else { None },
    })
}

/// Eigenvalues of one parity chain, ascending.
pub fn sector_energies(params: &ModelParams, parity: Parity, n_tr: usize) -> Result<Vec<f64>> {
    let (diag, off) = sector_matrix(params, parity, n_tr);
    tridiag::eigenvalues(&diag, &off)
}

/// The `count` lowest eigenvalues across both sectors.
pub fn lowest_energies(params: &ModelParams, n_tr: usize, count: usize) -> Result<Vec<f64>> {
    let opts = EdOptions {
        limit: usize::MAX,
        ..EdOptions::default()
    };
    let mut res = diagonalize(params, n_tr, &opts)?;
    res.energies.truncate(count);
    Ok(res.energies)
}

/// For each target energy, the nearest truncated eigenstate (either
/// parity) with its photon number.  Eigenvectors come from inverse
/// iteration, so this stays cheap even at large truncations.
pub fn nearest_states(params: &ModelParams, n_tr: usize, targets: &[f64]) -> Result<Vec<StateInfo>> {
    let mut sectors = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let (diag, off) = sector_matrix(params, parity, n_tr);
        let vals = tridiag::eigenvalues(&diag, &off)?;
        sectors.push((parity, diag, off, vals));
    }

    // Pick the closest eigenvalue over both sectors for every target.
    let mut picks: Vec<(usize, f64)> = Vec::with_capacity(targets.len()); // (sector, lambda)
    for &t in targets {
        let mut best: Option<(usize, f64)> = None;
        for (si, (_, _, _, vals)) in sectors.iter().enumerate() {
            let i = vals.partition_point(|&v| v < t);
            for cand in [i.wrapping_sub(1), i] {
                if let Some(&v) = vals.get(cand) {
                    if best.is_none() || (v - t).abs() < (best.unwrap().1 - t).abs() {
                        best = Some((si, v));
                    }
                }
            }
        }
        let (si, lam) = best.ok_or(Error::EigenFailed("empty spectrum"))?;
        picks.push((si, lam));
    }

    // Batch the inverse iterations per sector (ascending, as required).
    let mut out: Vec<Option<StateInfo>> = vec![None; targets.len()];
    for (si, (parity, diag, off, _)) in sectors.iter().enumerate() {
        let mut mine: Vec<(usize, f64)> = picks
            .iter()
            .enumerate()
            .filter(|(_, &(s, _))| s == si)
            .map(|(pos, &(_, lam))| (pos, lam))
            .collect();
        if mine.is_empty() {
            continue;
        }
        mine.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let lambdas: Vec<f64> = mine.iter().map(|m| m.1).collect();
        let vecs = tridiag::eigenvectors_clustered(diag, off, &lambdas)?;
        for ((pos, lam), vec) in mine.into_iter().zip(vecs) {
            out[pos] = Some(StateInfo {
                energy: lam,
                parity: parity.sign(),
                photon: photon_blocked(&vec),
            });
        }
    }
    Ok(out.into_iter().map(|s| s.unwrap()).collect())
}

/// Lowest `count` merged energies at each truncation in `truncations`.
pub fn convergence_sweep(
    params: &ModelParams,
    truncations: &[usize],
    count: usize,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let runs = crate::exec::map(truncations, |&n_tr| lowest_energies(params, n_tr, count));
    truncations
        .iter()
        .zip(runs)
        .map(|(&n_tr, r)| r.map(|v| (n_tr, v)))
        .collect()
}
