//! Scalar criteria on standard-form moments: the Duan inequality, Gaussian
//! P-positivity, logarithmic negativity and nonclassicality depth, plus the
//! PPT separability test used as an independent check on all of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{validate, CovarianceMatrix, Matrix4, StandardMoments};
use crate::scalar::Scalar;

/// Duan inequality evaluated at one value of `ζ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuanResult<T> {
    pub zeta: T,
    /// `⟨(Δu)²⟩ + ⟨(Δv)²⟩`.
    pub lhs: T,
    /// `ζ² + ζ⁻²`.
    pub rhs: T,
    /// `rhs − lhs`; positive means entangled.
    pub violation: T,
}

impl<T: Scalar> DuanResult<T> {
    pub fn at(moments: &StandardMoments<T>, zeta: T) -> Result<Self> {
        let lhs = duan_lhs(moments, zeta)?;
        let z2 = zeta * zeta;
        let rhs = z2 + z2.recip();
        Ok(Self { zeta, lhs, rhs, violation: rhs - lhs })
    }

    pub fn certifies_entanglement(&self, tol: T) -> bool {
        self.violation > tol
    }
}

/// Total variance of `u = |ζ| x_a + x_b / ζ` and `v = |ζ| p_a − p_b / ζ`.
pub fn duan_lhs<T: Scalar>(moments: &StandardMoments<T>, zeta: T) -> Result<T> {
    if zeta == T::zero() || !zeta.is_finite() {
        return Err(Error::Domain(format!("zeta must be finite and nonzero, got {zeta}")));
    }
    let m = moments;
    let z2 = zeta * zeta;
    Ok(z2 * (m.m1 + m.m2) + (m.n1 + m.n2) / z2 + T::two() * zeta.signum() * (m.c1 - m.c2))
}

/// The `ζ` minimizing `lhs − rhs` of the Duan inequality, i.e. maximizing
/// its violation: `ζ² = √(n1+n2−1) / √(m1+m2−1)`, negative when `c1 ≥ c2`.
///
/// For `c1 < c2` the minimizing sign is positive; that branch is returned
/// rather than rejected.
pub fn optimal_zeta<T: Scalar>(moments: &StandardMoments<T>) -> Result<T> {
    let m = moments;
    let excess_a = m.m1 + m.m2 - T::one();
    let excess_b = m.n1 + m.n2 - T::one();
    if excess_a <= T::zero() || excess_b <= T::zero() {
        return Err(Error::DegenerateState { local_a: (m.m1 + m.m2).as_f64(), local_b: (m.n1 + m.n2).as_f64() });
    }
    let magnitude = (excess_b.sqrt() / excess_a.sqrt()).sqrt();
    Ok(if m.c1 >= m.c2 { -magnitude } else { magnitude })
}

/// Whether the Gaussian state has a regular, nonnegative P function:
/// every local variance is at least vacuum and, per quadrature,
/// `(m_k − ½)(n_k − ½) ≥ c_k²`. Equality counts as positive.
pub fn gaussian_p_positive<T: Scalar>(moments: &StandardMoments<T>) -> bool {
    let half = T::half();
    let tol = T::boundary_tol();
    let m = moments;
    [(m.m1, m.n1, m.c1), (m.m2, m.n2, m.c2)]
        .iter()
        .all(|&(mk, nk, ck)| mk >= half - tol && nk >= half - tol && (mk - half) * (nk - half) >= ck * ck - tol)
}

/// Logarithmic negativity in both unclamped and clamped form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogNegativity<T> {
    /// `e = 2ν̃₋²`, twice the squared smallest PT symplectic eigenvalue.
    pub e: T,
    pub raw: T,
    pub clamped: T,
}

/// `e = Δ − √(Δ² − 4|Σ|)` with `Δ = m1 m2 + n1 n2 − 2 c1 c2` and
/// `|Σ| = (m1 n1 − c1²)(m2 n2 − c2²)`; `LN = −log₂ √(2e)`.
pub fn log_negativity<T: Scalar>(moments: &StandardMoments<T>) -> Result<LogNegativity<T>> {
    let e = pt_e(moments)?;
    // adding zero turns the −0 of a pure product state into +0
    let raw = -(T::two() * e).sqrt().log2() + T::zero();
    Ok(LogNegativity { e, raw, clamped: raw.max(T::zero()) })
}

/// `Δ − √(Δ² − 4|Σ|)` evaluated as `4|Σ| / (Δ + √(Δ² − 4|Σ|))`, which is the
/// same quantity without the cancellation for strongly entangled states.
pub(crate) fn pt_e<T: Scalar>(moments: &StandardMoments<T>) -> Result<T> {
    let m = moments;
    let delta = m.m1 * m.m2 + m.n1 * m.n2 - T::two() * m.c1 * m.c2;
    let det = (m.m1 * m.n1 - m.c1 * m.c1) * (m.m2 * m.n2 - m.c2 * m.c2);
    let four_det = T::lit(4.0) * det;
    let mut disc = delta * delta - four_det;
    if disc < T::zero() {
        if disc < -T::lit(1e-12) * delta * delta.max(T::one()) {
            return Err(Error::Domain(format!("Δ² − 4|Σ| = {disc:e} is negative")));
        }
        disc = T::zero();
    }
    let denom = delta + disc.sqrt();
    let e = if denom > T::zero() { four_det / denom } else { T::zero() };
    if e <= T::zero() || !e.is_finite() {
        return Err(Error::NumericalDegeneracy { e: e.as_f64() });
    }
    Ok(e)
}

/// Per-quadrature thresholds `T_k = ½(1 − m_k − n_k + √(4c_k² + (m_k − n_k)²))`,
/// the noise that makes condition `k` of [`gaussian_p_positive`] an equality.
pub fn quadrature_depths<T: Scalar>(moments: &StandardMoments<T>) -> [T; 2] {
    let m = moments;
    let t = |mk: T, nk: T, ck: T| {
        let d = mk - nk;
        T::half() * (T::one() - mk - nk + (T::lit(4.0) * ck * ck + d * d).sqrt())
    };
    [t(m.m1, m.n1, m.c1), t(m.m2, m.n2, m.c2)]
}

/// Smallest isotropic noise `T ≥ 0` after which the P function is regular
/// and positive. Both quadrature conditions must hold, so this is the larger
/// of the two [`quadrature_depths`].
pub fn nonclassicality_depth<T: Scalar>(moments: &StandardMoments<T>) -> T {
    let [t1, t2] = quadrature_depths(moments);
    t1.max(t2).max(T::zero())
}

/// PPT test: separable iff the partial transpose satisfies the uncertainty
/// relation. Exact for two-mode Gaussian states.
pub fn simon_separable<T: Scalar>(sigma: &CovarianceMatrix<T>) -> bool {
    sigma.pt_symplectic_eigenvalues().0 >= T::half() - T::physical_tol()
}

/// [`simon_separable`] on an unvalidated matrix; unphysical input is an error.
pub fn simon_separable_rows<T: Scalar>(rows: &Matrix4<T>) -> Result<bool> {
    let report = validate(rows)?;
    if !report.physical {
        return Err(Error::Unphysical { min_symplectic: report.symplectic_eigenvalues[0].as_f64() });
    }
    Ok(simon_separable(&CovarianceMatrix::new(*rows)?))
}

/// Every measure for one standard-form state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MeasureReportJson<T>", from = "MeasureReportJson<T>")]
#[serde(bound = "T: Scalar")]
pub struct MeasureReport<T> {
    pub log_negativity_raw: T,
    pub log_negativity: T,
    pub depth: T,
    pub gaussian_p_positive: bool,
    pub duan: DuanResult<T>,
    pub simon_separable: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct MeasureReportJson<T> {
    ln_raw: T,
    ln: T,
    depth: T,
    p_positive: bool,
    duan_zeta: T,
    duan_lhs: T,
    duan_violation: T,
    simon_separable: bool,
}

impl<T: Scalar> From<MeasureReport<T>> for MeasureReportJson<T> {
    fn from(r: MeasureReport<T>) -> Self {
        Self {
            ln_raw: r.log_negativity_raw,
            ln: r.log_negativity,
            depth: r.depth,
            p_positive: r.gaussian_p_positive,
            duan_zeta: r.duan.zeta,
            duan_lhs: r.duan.lhs,
            duan_violation: r.duan.violation,
            simon_separable: r.simon_separable,
        }
    }
}

impl<T: Scalar> From<MeasureReportJson<T>> for MeasureReport<T> {
    fn from(j: MeasureReportJson<T>) -> Self {
        let z2 = j.duan_zeta * j.duan_zeta;
        Self {
            log_negativity_raw: j.ln_raw,
            log_negativity: j.ln,
            depth: j.depth,
            gaussian_p_positive: j.p_positive,
            duan: DuanResult { zeta: j.duan_zeta, lhs: j.duan_lhs, rhs: z2 + z2.recip(), violation: j.duan_violation },
            simon_separable: j.simon_separable,
        }
    }
}

/// Duan test at the optimal `ζ`. States whose local noise does not exceed
/// vacuum in total fall back to `|ζ| = 1`.
pub fn duan_at_optimum<T: Scalar>(moments: &StandardMoments<T>) -> Result<DuanResult<T>> {
    let zeta = match optimal_zeta(moments) {
        Ok(z) => z,
        Err(Error::DegenerateState { .. }) => {
            if moments.c1 >= moments.c2 {
                -T::one()
            } else {
                T::one()
            }
        }
        Err(e) => return Err(e),
    };
    DuanResult::at(moments, zeta)
}

pub fn measure_all<T: Scalar>(moments: &StandardMoments<T>) -> Result<MeasureReport<T>> {
    let ln = log_negativity(moments)?;
    Ok(MeasureReport {
        log_negativity_raw: ln.raw,
        log_negativity: ln.clamped,
        depth: nonclassicality_depth(moments),
        gaussian_p_positive: gaussian_p_positive(moments),
        duan: duan_at_optimum(moments)?,
        simon_separable: simon_separable(&moments.to_covariance()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::to_standard_moments;
    use approx::assert_abs_diff_eq;

    fn vacuum() -> StandardMoments<f64> {
        StandardMoments::new(0.5, 0.5, 0.5, 0.5, 0.0, 0.0).unwrap()
    }

    fn tmsv() -> StandardMoments<f64> {
        to_standard_moments(&CovarianceMatrix::tmsv(0.5)).unwrap()
    }

    fn thermal() -> StandardMoments<f64> {
        StandardMoments::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn duan_lhs_examples() {
        assert_abs_diff_eq!(duan_lhs(&vacuum(), 1.0).unwrap(), 2.0);
        assert_abs_diff_eq!(duan_lhs(&tmsv(), -1.0).unwrap(), 2.0 * (-1f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(duan_lhs(&thermal(), 2.0).unwrap(), 8.5);
        assert!(matches!(duan_lhs(&vacuum(), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_zeta_examples() {
        assert_eq!(optimal_zeta(&thermal()).unwrap(), -1.0);
        assert_abs_diff_eq!(optimal_zeta(&tmsv()).unwrap(), -1.0, epsilon = 1e-15);
        let m = StandardMoments::new(1.0, 1.0, 2.5, 2.5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(optimal_zeta(&m).unwrap(), -(2f64.sqrt()), epsilon = 1e-15);
        assert!(matches!(optimal_zeta(&vacuum()), Err(Error::DegenerateState { .. })));
    }

    #[test]
    fn optimal_zeta_maximizes_violation_over_a_scan() {
        let m = StandardMoments::new(1.0, 1.0, 2.5, 2.5, 0.3, -0.1).unwrap();
        let best = DuanResult::at(&m, optimal_zeta(&m).unwrap()).unwrap().violation;
        let mut scanned = f64::NEG_INFINITY;
        for i in 1..=4000 {
            let z = -(i as f64) * 1e-3;
            let v = DuanResult::at(&m, z).unwrap().violation;
            assert!(best >= v - 1e-14);
            scanned = scanned.max(v);
        }
        assert_abs_diff_eq!(best, scanned, epsilon = 1e-6);
    }

    #[test]
    fn p_positivity_examples() {
        assert!(gaussian_p_positive(&vacuum()));
        assert!(!gaussian_p_positive(&tmsv()));
        assert!(gaussian_p_positive(&thermal()));
        let squeezed = StandardMoments::new(0.25, 1.0, 0.5, 0.5, 0.0, 0.0).unwrap();
        assert!(!gaussian_p_positive(&squeezed));
    }

    #[test]
    fn log_negativity_examples() {
        let v = log_negativity(&vacuum()).unwrap();
        assert_eq!(v.e, 0.5);
        assert_eq!(v.raw, 0.0);
        let t = log_negativity(&tmsv()).unwrap();
        assert_abs_diff_eq!(t.e, (-2f64).exp() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.raw, 1.0 / 2f64.ln(), epsilon = 1e-12);
        let th = log_negativity(&thermal()).unwrap();
        assert_abs_diff_eq!(th.e, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(th.raw, -1.0, epsilon = 1e-15);
        assert_eq!(th.clamped, 0.0);
    }

    #[test]
    fn depth_examples() {
        assert_eq!(nonclassicality_depth(&vacuum()), 0.0);
        assert_abs_diff_eq!(nonclassicality_depth(&tmsv()), 0.5 * (1.0 - (-1f64).exp()), epsilon = 1e-12);
        assert_eq!(quadrature_depths(&thermal()), [-0.5, -0.5]);
        assert_eq!(nonclassicality_depth(&thermal()), 0.0);
    }

    #[test]
    fn depth_takes_the_worse_quadrature() {
        // Locally x-squeezed vacuum: only the x quadrature needs noise.
        let m = StandardMoments::new(0.25, 1.0, 0.5, 0.5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(nonclassicality_depth(&m), 0.25, epsilon = 1e-15);
        assert!(gaussian_p_positive(&m.with_added_noise(0.25).unwrap()));
    }

    #[test]
    fn simon_examples() {
        assert!(simon_separable(&CovarianceMatrix::<f64>::vacuum()));
        assert!(!simon_separable(&CovarianceMatrix::tmsv(0.5)));
        assert!(simon_separable(&CovarianceMatrix::thermal(0.3, 2.0)));
        let (nu, _) = CovarianceMatrix::tmsv(0.5).pt_symplectic_eigenvalues();
        assert_abs_diff_eq!(nu, (-1f64).exp() / 2.0, epsilon = 1e-12);
        let bad = [[0.25, 0.0, 0.0, 0.0], [0.0, 0.25, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.0, 0.5]];
        assert!(simon_separable_rows(&bad).is_err());
    }

    #[test]
    fn measure_all_examples() {
        let v = measure_all(&vacuum()).unwrap();
        assert_eq!((v.log_negativity, v.depth), (0.0, 0.0));
        assert!(v.gaussian_p_positive && v.simon_separable);
        assert_eq!(v.duan.violation, 0.0);

        let t = measure_all(&tmsv()).unwrap();
        assert_abs_diff_eq!(t.log_negativity, std::f64::consts::LOG2_E, epsilon = 1e-12);
        assert_abs_diff_eq!(t.depth, 0.316060, epsilon = 1e-6);
        assert!(!t.gaussian_p_positive && !t.simon_separable);
        assert_abs_diff_eq!(t.duan.violation, 2.0 - 2.0 * (-1f64).exp(), epsilon = 1e-12);

        let th = measure_all(&thermal()).unwrap();
        assert_eq!((th.log_negativity, th.depth), (0.0, 0.0));
        assert!(th.gaussian_p_positive && th.simon_separable);
    }

    #[test]
    fn report_json_field_names() {
        let v: serde_json::Value = serde_json::to_value(measure_all(&tmsv()).unwrap()).unwrap();
        for key in ["ln_raw", "ln", "depth", "p_positive", "duan_zeta", "duan_lhs", "duan_violation", "simon_separable"]
        {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v.as_object().unwrap().len(), 8);
    }
}
