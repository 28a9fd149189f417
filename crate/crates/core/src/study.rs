//! Monte Carlo campaigns relating nonclassicality depth to logarithmic
//! negativity, and the perturbative check that the two move together for
//! symmetric states.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::gaussian::StandardMoments;
use crate::measures::{log_negativity, nonclassicality_depth, pt_e, simon_separable};
use crate::sampler::{sample_state, SamplerConfig};

pub const BIN_WIDTH: f64 = 1e-3;
pub const MIN_RECORDS: usize = 100;

/// One sampled state after canonicalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub state_id: usize,
    /// Depth of the canonical moments; NaN when not converged.
    pub depth: f64,
    /// Clamped LN of the canonical moments; NaN when not converged.
    pub ln: f64,
    pub converged: bool,
    pub residuals: (f64, f64),
    /// LN of the sampled matrix itself, before any local transform.
    pub ln_input: f64,
    /// Smallest PT symplectic eigenvalue of the sampled matrix.
    pub pt_nu_minus: f64,
    pub simon_separable: bool,
    pub p_positive: bool,
}

fn record(config: &SamplerConfig, state_id: usize) -> Result<StudyRecord> {
    let sigma = sample_state::<f64>(config, state_id)?;
    let pt_nu_minus = sigma.pt_symplectic_eigenvalues().0;
    let mut rec = StudyRecord {
        state_id,
        depth: f64::NAN,
        ln: f64::NAN,
        converged: false,
        residuals: (f64::NAN, f64::NAN),
        ln_input: sigma.log_negativity(),
        pt_nu_minus,
        simon_separable: simon_separable(&sigma),
        p_positive: false,
    };
    let Ok(canon) = canonicalize(&sigma) else {
        return Ok(rec);
    };
    rec.residuals = (canon.residual_11, canon.residual_14);
    rec.p_positive = canon.p_positive();
    if !canon.converged {
        return Ok(rec);
    }
    if let Ok(ln) = log_negativity(&canon.moments) {
        rec.depth = nonclassicality_depth(&canon.moments);
        rec.ln = ln.clamped;
        rec.converged = true;
    }
    Ok(rec)
}

/// Sample `config.count` states and canonicalize each one. Records are in
/// `state_id` order whatever the thread count.
pub fn run_study(config: &SamplerConfig) -> Result<Vec<StudyRecord>> {
    config.validate()?;
    (0..config.count).into_par_iter().map(|i| record(config, i)).collect()
}

/// Study CSV with header `state_id,depth,ln,converged`.
pub fn records_to_csv(records: &[StudyRecord]) -> String {
    let mut out = String::from("state_id,depth,ln,converged\n");
    for r in records {
        let _ = writeln!(out, "{},{:.15e},{:.15e},{}", r.state_id, r.depth, r.ln, r.converged);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationBin {
    /// Bin `k` covers depths in `[k·w, (k+1)·w)`.
    pub index: i64,
    pub depth_lo: f64,
    pub count: usize,
    pub ln_min: f64,
    pub ln_max: f64,
    pub spread: f64,
    /// Spread of the residuals after a least-squares line through the bin.
    /// Removes the part of the spread that a smooth single-valued relation
    /// would produce across a finite bin.
    pub detrended_spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub bins: Vec<RelationBin>,
    pub max_spread: f64,
    pub n_converged: usize,
    pub max_detrended_spread: f64,
}

fn detrended_spread(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let r = p.1 - my - slope * (p.0 - mx);
        (lo.min(r), hi.max(r))
    });
    hi - lo
}

/// Bin converged records by depth and measure how far LN varies inside
/// each bin. A one-to-one depth→LN relation gives spreads that shrink with
/// the bin width.
pub fn relation_analysis(records: &[StudyRecord]) -> Result<RelationReport> {
    let mut groups: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut n_converged = 0;
    for r in records.iter().filter(|r| r.converged) {
        n_converged += 1;
        groups.entry((r.depth / BIN_WIDTH).floor() as i64).or_default().push((r.depth, r.ln));
    }
    if n_converged < MIN_RECORDS {
        return Err(Error::TooFewRecords { found: n_converged, required: MIN_RECORDS });
    }
    let bins: Vec<RelationBin> = groups
        .into_iter()
        .map(|(index, pts)| {
            let ln_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let ln_max = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            RelationBin {
                index,
                depth_lo: index as f64 * BIN_WIDTH,
                count: pts.len(),
                ln_min,
                ln_max,
                spread: ln_max - ln_min,
                detrended_spread: detrended_spread(&pts),
            }
        })
        .collect();
    let max_spread = bins.iter().map(|b| b.spread).fold(0.0, f64::max);
    let max_detrended_spread = bins.iter().map(|b| b.detrended_spread).fold(0.0, f64::max);
    Ok(RelationReport { bins, max_spread, n_converged, max_detrended_spread })
}

/// A symmetric state `m1 = m2 = m`, `n1 = n2 = n`, `c1 = −c2 = c` and a
/// change `δc` of its correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub m: f64,
    pub n: f64,
    pub c: f64,
    pub delta_c: f64,
    /// Relative tolerance on `Δe`.
    pub tolerance: f64,
    /// `δm − δn`. Depth only fixes `δm + δn`; zero splits it evenly.
    #[serde(default)]
    pub split: f64,
}

impl PerturbationSpec {
    pub fn new(m: f64, n: f64, c: f64, delta_c: f64) -> Self {
        Self { m, n, c, delta_c, tolerance: 1e-10, split: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOutcome {
    pub delta_m: f64,
    pub delta_n: f64,
    pub e: f64,
    pub e_perturbed: f64,
    /// `2(δc² + 2cδc − δmδn − mδn − nδm) + χ(δm + δn)` with
    /// `χ = m + n − √(4c² + (m−n)²)`.
    pub delta_e: f64,
    /// `e′ − e` from the moments directly.
    pub delta_e_direct: f64,
    /// The same expansion with `χ = m + n − √(4c² − (m−n)²)`; NaN when the
    /// radicand is negative.
    pub delta_e_minus_variant: f64,
    pub depth: f64,
    pub depth_perturbed: f64,
    /// Both `|Δe|` values below `tolerance · max(1, |e|)`.
    pub holds: bool,
}

/// `e` for symmetric moments: `m² + n² + 2c² − (m+n)√(4c² + (m−n)²)`.
pub fn symmetric_e(m: f64, n: f64, c: f64) -> f64 {
    m * m + n * n + 2.0 * c * c - (m + n) * (4.0 * c * c + (m - n).powi(2)).sqrt()
}

fn expansion(m: f64, n: f64, c: f64, dm: f64, dn: f64, dc: f64, chi: f64) -> f64 {
    2.0 * (dc * dc + 2.0 * c * dc - dm * dn - m * dn - n * dm) + chi * (dm + dn)
}

fn symmetric_state(m: f64, n: f64, c: f64) -> Result<StandardMoments<f64>> {
    StandardMoments::new(m, m, n, n, c, -c)
}

/// Change `(m, n)` so that depth is unchanged after `c → c + δc`, then
/// compare LN before and after.
pub fn perturbation_identity(spec: &PerturbationSpec) -> Result<PerturbationOutcome> {
    let PerturbationSpec { m, n, c, delta_c: dc, tolerance, split } = *spec;
    let base = symmetric_state(m, n, c)?;
    if c <= 0.0 || log_negativity(&base)?.raw <= 0.0 {
        return Err(Error::Domain(format!("base state (m, n, c) = ({m}, {n}, {c}) is not entangled")));
    }
    if dc.abs() > 0.1 * c {
        return Err(Error::Domain(format!("|δc| = {} exceeds 0.1·c = {}", dc.abs(), 0.1 * c)));
    }
    let r = (4.0 * c * c + (m - n).powi(2)).sqrt();
    let r_new = (4.0 * (c + dc).powi(2) + (m - n + split).powi(2)).sqrt();
    let sum = r_new - r;
    let (dm, dn) = ((sum + split) / 2.0, (sum - split) / 2.0);
    let perturbed = symmetric_state(m + dm, n + dn, c + dc)?;

    let e = pt_e(&base)?;
    let e_perturbed = pt_e(&perturbed)?;
    let chi = m + n - r;
    let delta_e = expansion(m, n, c, dm, dn, dc, chi);
    let delta_e_direct = e_perturbed - e;
    let chi_minus = m + n - (4.0 * c * c - (m - n).powi(2)).sqrt();
    let bound = tolerance * e.abs().max(1.0);
    Ok(PerturbationOutcome {
        delta_m: dm,
        delta_n: dn,
        e,
        e_perturbed,
        delta_e,
        delta_e_direct,
        delta_e_minus_variant: expansion(m, n, c, dm, dn, dc, chi_minus),
        depth: nonclassicality_depth(&base),
        depth_perturbed: nonclassicality_depth(&perturbed),
        holds: delta_e.abs() < bound && delta_e_direct.abs() < bound,
    })
}

/// `e′ − e` when `c` moves by `δc` and `m, n` move by the given amounts,
/// with no attempt to keep the depth fixed.
pub fn naive_delta_e(m: f64, n: f64, c: f64, delta_m: f64, delta_n: f64, delta_c: f64) -> Result<f64> {
    let base = symmetric_state(m, n, c)?;
    let moved = symmetric_state(m + delta_m, n + delta_n, c + delta_c)?;
    Ok(pt_e(&moved)? - pt_e(&base)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tmsv_moments() -> (f64, f64, f64) {
        (1f64.cosh() / 2.0, 1f64.cosh() / 2.0, 1f64.sinh() / 2.0)
    }

    #[test]
    fn symmetric_e_matches_general_form() {
        for &(m, n, c) in &[(1.2, 0.9, 0.6), (0.7, 2.0, 0.5), (1.0, 1.0, 0.3)] {
            let e = pt_e(&symmetric_state(m, n, c).unwrap()).unwrap();
            assert_abs_diff_eq!(symmetric_e(m, n, c), e, epsilon = 1e-13);
            let t = nonclassicality_depth(&symmetric_state(m, n, c).unwrap());
            if t > 0.0 {
                assert_abs_diff_eq!(e, (1.0 - 2.0 * t).powi(2) / 2.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn null_perturbation() {
        let (m, n, c) = tmsv_moments();
        let out = perturbation_identity(&PerturbationSpec::new(m, n, c, 0.0)).unwrap();
        assert_eq!((out.delta_m, out.delta_n), (0.0, 0.0));
        assert_eq!(out.delta_e, 0.0);
        assert_eq!(out.delta_e_direct, 0.0);
    }

    #[test]
    fn tmsv_perturbation_keeps_e() {
        let (m, n, c) = tmsv_moments();
        let out = perturbation_identity(&PerturbationSpec::new(m, n, c, 0.01)).unwrap();
        assert!(out.holds, "{out:?}");
        assert!(out.delta_e.abs() < 1e-10 && out.delta_e_direct.abs() < 1e-10);
        assert!((out.depth - out.depth_perturbed).abs() < 1e-12);
        // m = n, so the two χ variants coincide here
        assert_abs_diff_eq!(out.delta_e_minus_variant, out.delta_e, epsilon = 1e-15);
    }

    #[test]
    fn minus_variant_disagrees_off_diagonal() {
        let out = perturbation_identity(&PerturbationSpec::new(1.4, 0.8, 0.7, 0.02)).unwrap();
        assert!(out.holds);
        assert!(out.delta_e_minus_variant.abs() > 1e-4, "{out:?}");
    }

    #[test]
    fn asymmetric_splits_also_hold() {
        for split in [-0.01, 0.003, 0.02] {
            let spec = PerturbationSpec { split, ..PerturbationSpec::new(1.3, 1.1, 0.8, -0.03) };
            let out = perturbation_identity(&spec).unwrap();
            assert!(out.holds, "split {split}: {out:?}");
            assert_abs_diff_eq!(out.delta_m - out.delta_n, split, epsilon = 1e-15);
        }
    }

    #[test]
    fn naive_perturbation_changes_e() {
        let (m, n, c) = tmsv_moments();
        assert!(naive_delta_e(m, n, c, 0.0, 0.0, -0.01).unwrap().abs() > 1e-6);
        assert!(naive_delta_e(m, n, c, 0.0, 0.0, 0.01).is_err());
    }

    #[test]
    fn rejects_large_or_unentangled() {
        let (m, n, c) = tmsv_moments();
        assert!(perturbation_identity(&PerturbationSpec::new(m, n, c, 0.2 * c)).is_err());
        assert!(perturbation_identity(&PerturbationSpec::new(1.0, 1.0, 0.1, 0.0)).is_err());
    }

    #[test]
    fn study_is_ordered_and_repeatable() {
        let cfg = SamplerConfig { seed: 5, count: 200, ..SamplerConfig::default() };
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        assert_eq!(records_to_csv(&a), records_to_csv(&b));
        assert!(a.iter().enumerate().all(|(i, r)| r.state_id == i));
        assert!(a.iter().filter(|r| r.converged).all(|r| r.ln <= 0.0 || r.depth > 0.0));
    }

    #[test]
    fn identical_records_have_zero_spread() {
        let one = StudyRecord {
            state_id: 0,
            depth: 0.25,
            ln: 0.5,
            converged: true,
            residuals: (0.0, 0.0),
            ln_input: 0.5,
            pt_nu_minus: 0.3,
            simon_separable: false,
            p_positive: false,
        };
        let recs: Vec<_> = (0..150).map(|i| StudyRecord { state_id: i, ..one }).collect();
        let report = relation_analysis(&recs).unwrap();
        assert_eq!(report.bins.len(), 1);
        assert_eq!(report.max_spread, 0.0);
        assert!(matches!(relation_analysis(&recs[..99]), Err(Error::TooFewRecords { found: 99, .. })));
    }
}
