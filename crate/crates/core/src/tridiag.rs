//! Symmetric tridiagonal eigensolvers.
//!
//! The parity blocks of the Hamiltonian are exactly tridiagonal, so instead
//! of going through a dense solver this module provides the classic
//! implicit-shift QL iteration (eigenvalues in O(n^2), optionally with
//! accumulated eigenvectors) and inverse iteration for a few selected
//! eigenvectors of large matrices.  `diag` holds the n diagonal entries and
//! `off` the n-1 couplings between neighbors.

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 50;

fn check_shape(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::InvalidParams("empty tridiagonal matrix".into()));
    }
    if off.len() + 1 != diag.len() {
        return Err(Error::InvalidParams(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            diag.len()
        )));
    }
    Ok(())
}

/// All eigenvalues, ascending.  Implicit-shift QL without vector
/// accumulation.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_shape(diag, off)?;
    let mut d = diag.to_vec();
    let mut e = vec![0.0; d.len()];
    e[..off.len()].copy_from_slice(off);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// All eigenpairs, ascending by eigenvalue.  Returns `(values, vectors)`
/// with `vectors[j]` the normalized eigenvector of `values[j]`.
pub fn eigen_decomposition(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_shape(diag, off)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    // Rotation accumulator, row-major; starts as the identity.
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row = vec![0.0; n];
            row[k] = 1.0;
            row
        })
        .collect();
    ql_implicit(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| {
            let mut v: Vec<f64> = (0..n).map(|k| z[k][j]).collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok((values, vectors))
}

/// Implicit-shift QL sweeps; `d` receives the eigenvalues (unsorted), `e`
/// is workspace (one sentinel slot past the couplings).  When `z` is given,
/// the plane rotations are accumulated into its columns.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<f64>>>) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible coupling splitting off a converged block.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::EigenFailed("QL iteration limit"));
            }

            // Wilkinson-like shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zz) = z.as_deref_mut() {
                    for row in zz.iter_mut() {
                        f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Deterministic sign convention: the entry of largest magnitude is
/// positive.
fn fix_sign(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (k, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = k;
        }
    }
    if v[idx] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Eigenvector for one eigenvalue via inverse iteration.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let vs = eigenvectors_clustered(diag, off, &[lambda])?;
    Ok(vs.into_iter().next().unwrap())
}

/// Eigenvectors for a set of eigenvalues (ascending) via inverse iteration,
/// with reorthogonalization inside clusters of nearly equal values.
pub fn eigenvectors_clustered(
    diag: &[f64],
    off: &[f64],
    lambdas: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_shape(diag, off)?;
    let n = diag.len();
    let anorm = diag
        .iter()
        .map(|x| x.abs())
        .chain(off.iter().map(|x| 2.0 * x.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let cluster_tol = 1e-8 * anorm;

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(lambdas.len());
    let mut cluster_start = 0;
    for (j, &lam) in lambdas.iter().enumerate() {
        if j > 0 && (lam - lambdas[j - 1]).abs() > cluster_tol {
            cluster_start = j;
        }
        // Tiny deterministic separation inside a cluster keeps the shifted
        // systems distinct.
        let shift = lam + (j - cluster_start) as f64 * 8.0 * f64::EPSILON * anorm;

        // Fixed pseudo-random start vector (no RNG: determinism matters).
        let mut v: Vec<f64> = (0..n)
            .map(|k| 1.0 + 0.5 * ((k as f64 + 1.0) * 2.399963).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            solve_shifted(diag, off, shift, anorm, &mut v);
            for prev in &out[cluster_start..j] {
                let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= dot * p;
                }
            }
            normalize(&mut v);
        }
        fix_sign(&mut v);
        out.push(v);
    }
    Ok(out)
}

fn normalize(v: &mut [f64]) {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Solves (T - shift I) x = rhs in place by Gaussian elimination with
/// partial pivoting (one fill-in superdiagonal).
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, anorm: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let safe = f64::EPSILON * anorm;
    let mut dd: Vec<f64> = diag.iter().map(|&x| x - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut dl: Vec<f64> = off.to_vec();
    let mut swapped = vec![false; n.saturating_sub(1)];

    for i in 0..n - 1 {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == 0.0 {
                dd[i] = safe;
            }
            let m = dl[i] / dd[i];
            dl[i] = m;
            dd[i + 1] -= m * du[i];
        } else {
            swapped[i] = true;
            let m = dd[i] / dl[i];
            let old_dd_next = dd[i + 1];
            let old_du_next = if i + 1 < n - 1 { du[i + 1] } else { 0.0 };
            dd[i] = dl[i];
            dl[i] = m;
            dd[i + 1] = du[i] - m * old_dd_next;
            du[i] = old_dd_next;
            if i < du2.len() {
                du2[i] = old_du_next;
            }
            if i + 1 < n - 1 {
                du[i + 1] = -m * old_du_next;
            }
        }
    }
    if dd[n - 1] == 0.0 {
        dd[n - 1] = safe;
    }

    // Forward substitution.
    for i in 0..n - 1 {
        if swapped[i] {
            let t = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = t - dl[i] * rhs[i + 1];
        } else {
            rhs[i + 1] -= dl[i] * rhs[i];
        }
    }
    // Back substitution.
    rhs[n - 1] /= dd[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / dd[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / dd[i];
    }
}
