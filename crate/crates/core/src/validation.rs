//! End-to-end agreement checks between the analytic solver and exact
//! diagonalization.
//!
//! The standard suite cross-validates, on a fixed parameter grid:
//!
//! * **completeness** — every truncated-diagonalization eigenvalue inside
//!   an energy window is found by the G-function root scan and vice versa
//!   (levels pinched onto a pole closer than the scan can resolve are
//!   matched against the pole ladder instead);
//! * **degeneracy dichotomy** — closed-form crossing couplings host true
//!   double degeneracies, while exceptional nondegenerate points keep a
//!   finite gap to their neighbors;
//! * **closed-form consistency** — the ground-crossing coupling is the
//!   zeroth entry of the crossing ladder (bitwise) and the ladder is
//!   strictly increasing;
//! * **collapse branches** — upper and trapped levels on the |u| = 2 omega
//!   line agree with a high-truncation diagonalization, for both signs
//!   of u.

use serde::Serialize;

use crate::collapse::CollapseModel;
use crate::ed;
use crate::exec;
use crate::gfunction;
use crate::model::{ModelParams, Parity, SolverConfig};
use crate::spectrum::{self, ModelFamily};

/// One named pass/fail outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed: false,
            detail: detail.into(),
        }
    }
}

/// Aggregated suite result.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Greedy two-pointer matching of two ascending lists; returns the
/// unmatched leftovers of each side.
fn unmatched(a: &[f64], b: &[f64], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut i, mut j) = (0, 0);
    let (mut left_a, mut left_b) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        let d = a[i] - b[j];
        if d.abs() <= tol {
            i += 1;
            j += 1;
        } else if d < 0.0 {
            left_a.push(a[i]);
            i += 1;
        } else {
            left_b.push(b[j]);
            j += 1;
        }
    }
    left_a.extend(&a[i..]);
    left_b.extend(&b[j..]);
    (left_a, left_b)
}

const MATCH_TOL: f64 = 1e-6;
const WINDOW: (f64, f64) = (-1.5, 2.0);
const MARGIN: f64 = 0.1;

fn completeness_check(delta: f64, u: f64, g: f64, cfg: &SolverConfig) -> CheckOutcome {
    let name = format!("completeness delta={delta} u={u} g={g}");
    log::debug!("{name}: diagonalizing the reference spectrum");
    let params = match ModelParams::new(delta, 1.0, u, g) {
        Ok(p) => p,
        Err(e) => return CheckOutcome::fail(name, e.to_string()),
    };
    let (lo, hi) = WINDOW;
    let (ilo, ihi) = (lo + MARGIN, hi - MARGIN);

    let ed_levels: Vec<f64> = match ed::lowest_energies(&params, 300, usize::MAX) {
        Ok(all) => all
            .into_iter()
            .filter(|e| (ilo..=ihi).contains(e))
            .collect(),
        Err(e) => return CheckOutcome::fail(name, e.to_string()),
    };
    let pole_ladder = match gfunction::pole_set(&params, lo, hi) {
        Ok(ps) => ps.in_window(lo, hi),
        Err(e) => return CheckOutcome::fail(name, e.to_string()),
    };

    let mut per_segment = 64;
    let mut last_detail = String::new();
    while per_segment <= 1024 {
        let mut roots = Vec::new();
        let mut scan_err = None;
        for parity in [Parity::Even, Parity::Odd] {
            match spectrum::regular_levels(&params, parity, lo, hi, per_segment, cfg) {
                Ok(scan) => roots.extend(scan.levels.into_iter().map(|l| l.energy)),
                Err(e) => scan_err = Some(e),
            }
        }
        if let Some(e) = scan_err {
            return CheckOutcome::fail(name, e.to_string());
        }
        roots.retain(|e| (ilo..=ihi).contains(e));
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());

        let (stray_roots, missed) = unmatched(&roots, &ed_levels, MATCH_TOL);
        // Levels pinched onto a pole beyond the scan resolution are
        // accounted for by the ladder itself.
        let missed: Vec<f64> = missed
            .into_iter()
            .filter(|e| !pole_ladder.iter().any(|p| (e - p).abs() < 1e-5))
            .collect();
        if stray_roots.is_empty() && missed.is_empty() {
            return CheckOutcome::pass(
                name,
                format!(
                    "{} levels matched to {MATCH_TOL:.0e} ({per_segment} samples/segment)",
                    ed_levels.len()
                ),
            );
        }
        last_detail = format!(
            "unmatched solver roots {stray_roots:?}, unmatched reference levels {missed:?} \
             at {per_segment} samples/segment"
        );
        log::debug!("{name}: {last_detail}; refining the scan");
        per_segment *= 2;
    }
    CheckOutcome::fail(name, last_detail)
}

fn degeneracy_checks(cfg: &SolverConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &(delta, u) in &[(0.5, 1.0), (1.0, 1.9)] {
        let fam = ModelFamily { delta, omega: 1.0, u };
        let e_star = -delta / u;
        for n in 0..3 {
            let name = format!("crossing degeneracy delta={delta} u={u} n={n}");
            let gc = match spectrum::juddian_coupling_n(&fam, n) {
                Ok(g) => g,
                Err(e) => {
                    out.push(CheckOutcome::fail(name, e.to_string()));
                    continue;
                }
            };
            let params = ModelParams::new(delta, 1.0, u, gc).unwrap();
            let mut nearest = Vec::new();
            for parity in [Parity::Even, Parity::Odd] {
                match ed::sector_energies(&params, parity, 400) {
                    Ok(es) => {
                        let best = es
                            .iter()
                            .cloned()
                            .min_by(|a, b| {
                                (a - e_star).abs().partial_cmp(&(b - e_star).abs()).unwrap()
                            })
                            .unwrap();
                        nearest.push(best);
                    }
                    Err(e) => {
                        out.push(CheckOutcome::fail(name.clone(), e.to_string()));
                        nearest.clear();
                        break;
                    }
                }
            }
            if nearest.len() != 2 {
                continue;
            }
            let gap = (nearest[0] - nearest[1]).abs();
            let offset = (nearest[0] - e_star).abs().max((nearest[1] - e_star).abs());
            if gap < 1e-6 && offset < 1e-6 {
                out.push(CheckOutcome::pass(
                    name,
                    format!("gap {gap:.1e}, offset {offset:.1e} at g = {gc:.10}"),
                ));
            } else {
                out.push(CheckOutcome::fail(
                    name,
                    format!("gap {gap:.1e}, offset {offset:.1e} at g = {gc:.10}"),
                ));
            }
        }
    }

    // Exceptional points must stay nondegenerate.
    let fam = ModelFamily { delta: 1.0, omega: 1.0, u: 1.9 };
    for m in 0..3usize {
        for parity in [Parity::Even, Parity::Odd] {
            let name = format!("exceptional isolation m={m} parity={parity}");
            let points = match spectrum::exceptional_points(&fam, m, parity, 0.05, 1.0, 512, cfg) {
                Ok(p) => p,
                Err(e) => {
                    out.push(CheckOutcome::fail(name, e.to_string()));
                    continue;
                }
            };
            if points.is_empty() {
                out.push(CheckOutcome::pass(name, "no points in the scan window"));
                continue;
            }
            let mut ok = true;
            let mut detail = String::new();
            for g_star in &points {
                let params = ModelParams::new(1.0, 1.0, 1.9, *g_star).unwrap();
                let rd_pole = match m {
                    0 => gfunction::seed_pole(&params).unwrap(),
                    _ => gfunction::ladder_pole(&params, m).unwrap(),
                };
                let all = match ed::lowest_energies(&params, 400, usize::MAX) {
                    Ok(a) => a,
                    Err(e) => {
                        ok = false;
                        detail = e.to_string();
                        break;
                    }
                };
                let mut dists: Vec<f64> = all.iter().map(|e| (e - rd_pole).abs()).collect();
                dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if !(dists[0] < 1e-5 && dists[1] > 1e-4) {
                    ok = false;
                    detail = format!(
                        "g = {g_star:.8}: nearest {:.2e}, second {:.2e}",
                        dists[0], dists[1]
                    );
                    break;
                }
            }
            if ok {
                out.push(CheckOutcome::pass(
                    name,
                    format!("{} point(s) isolated on the pole", points.len()),
                ));
            } else {
                out.push(CheckOutcome::fail(name, detail));
            }
        }
    }
    out
}

fn closed_form_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &(delta, u) in &[(0.5, 1.0), (1.0, 1.9)] {
        let fam = ModelFamily { delta, omega: 1.0, u };
        let name = format!("crossing ladder delta={delta} u={u}");
        let gc = spectrum::juddian_coupling(&fam);
        let gc0 = spectrum::juddian_coupling_n(&fam, 0);
        match (gc, gc0) {
            (Ok(a), Ok(b)) if a.to_bits() == b.to_bits() => {
                let mut increasing = true;
                let mut last = 0.0;
                for n in 0..7 {
                    let g = spectrum::juddian_coupling_n(&fam, n).unwrap();
                    increasing &= g > last;
                    last = g;
                }
                if increasing {
                    out.push(CheckOutcome::pass(
                        name,
                        format!("ground coupling {a:.12}, ladder strictly increasing"),
                    ));
                } else {
                    out.push(CheckOutcome::fail(name, "ladder not increasing"));
                }
            }
            (Ok(a), Ok(b)) => out.push(CheckOutcome::fail(
                name,
                format!("ground coupling {a:.17} != ladder entry {b:.17}"),
            )),
            (Err(e), _) | (_, Err(e)) => out.push(CheckOutcome::fail(name, e.to_string())),
        }
    }
    out
}

fn collapse_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &u in &[2.0, -2.0] {
        let name = format!("collapse branches u={u}");
        let params = match ModelParams::collapse(0.5, 1.0, u, 0.3) {
            Ok(p) => p,
            Err(e) => {
                out.push(CheckOutcome::fail(name, e.to_string()));
                continue;
            }
        };
        let model = CollapseModel::from_params(&params).unwrap();
        let mut predicted: Vec<f64> = Vec::new();
        match model.lower_levels(4) {
            Ok(ls) => predicted.extend(ls.iter().map(|l| l.energy)),
            Err(e) => {
                out.push(CheckOutcome::fail(name, e.to_string()));
                continue;
            }
        }
        match model.upper_levels(2) {
            Ok(ls) => predicted.extend(ls.iter().map(|l| l.energy)),
            Err(e) => {
                out.push(CheckOutcome::fail(name, e.to_string()));
                continue;
            }
        }
        let reference = match ed::lowest_energies(&params, 2000, usize::MAX) {
            Ok(r) => r,
            Err(e) => {
                out.push(CheckOutcome::fail(name, e.to_string()));
                continue;
            }
        };
        let worst = predicted
            .iter()
            .map(|p| {
                reference
                    .iter()
                    .map(|r| (p - r).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        if worst < 1e-4 {
            out.push(CheckOutcome::pass(
                name,
                format!("6 branch levels matched, worst offset {worst:.1e}"),
            ));
        } else {
            out.push(CheckOutcome::fail(
                name,
                format!("worst branch-level offset {worst:.1e}"),
            ));
        }
    }
    out
}

/// Runs the full standard suite.
pub fn run_standard(cfg: &SolverConfig) -> ValidationReport {
    let mut grid = Vec::new();
    for &delta in &[0.5, 1.0] {
        for &u in &[-1.0, 1.0, 1.9] {
            for &g in &[0.1, 0.4, 0.7] {
                grid.push((delta, u, g));
            }
        }
    }
    let mut checks = exec::map(&grid, |&(delta, u, g)| completeness_check(delta, u, g, cfg));
    checks.extend(degeneracy_checks(cfg));
    checks.extend(closed_form_checks());
    checks.extend(collapse_checks());
    for check in &checks {
        log::info!(
            "{}: {}",
            check.name,
            if check.passed { "ok" } else { "FAILED" }
        );
    }
    ValidationReport { checks }
}

/// Runs a reduced suite touching every solver path once: a single
/// completeness cell, the closed-form ladder identities, and one pair of
/// collapse-branch comparisons.  Suitable as a smoke test where the full
/// grid would be too slow.
pub fn run_quick(cfg: &SolverConfig) -> ValidationReport {
    let mut checks = vec![completeness_check(0.5, 1.0, 0.4, cfg)];
    checks.extend(closed_form_checks());
    checks.extend(collapse_checks());
    for check in &checks {
        log::info!(
            "{}: {}",
            check.name,
            if check.passed { "ok" } else { "FAILED" }
        );
    }
    ValidationReport { checks }
}
