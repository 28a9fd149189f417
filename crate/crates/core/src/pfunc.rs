//! Glauber–Sudarshan P function of the separable mixture
//!
//! ```text
//! ρ = p ρ_|β⟩ ⊗ ρ_|1⟩ + (1 − p) ρ_|−β⟩ ⊗ ρ_|0⟩
//! ```
//!
//! where every component carries half a unit of extra vacuum noise so that
//! the P function is regular:
//!
//! ```text
//! P(α_a, α_b) = (4p/π²)(4|α_b|² − 1) e^{−2|α_a−β|² − 2|α_b|²}
//!             + (4(1−p)/π²) e^{−2|α_a+β|² − 2|α_b|²}
//! ```
//!
//! Each complex plane contributes a factor `2/π`, which makes `∫P = 1`. For `0 < p < ½` both
//! marginals are positive everywhere while the joint function is not: global
//! nonclassicality without entanglement, since `ρ` is a convex combination
//! of product states.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MixtureParams<T> {
    pub beta: Complex<T>,
    /// Weight of the single-photon branch.
    pub p: T,
}

impl<T: Scalar> MixtureParams<T> {
    pub fn new(beta: Complex<T>, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::Domain(format!("p = {p} must lie in [0, 1]")));
        }
        if !beta.re.is_finite() || !beta.im.is_finite() {
            return Err(Error::Domain("beta must be finite".into()));
        }
        Ok(Self { beta, p })
    }

    pub fn real(beta: T, p: T) -> Result<Self> {
        Self::new(Complex::new(beta, T::zero()), p)
    }

    /// `β = 2`, `p = 1/4`: both marginals positive, joint function not.
    pub fn demo() -> Self {
        Self { beta: Complex::new(T::two(), T::zero()), p: T::lit(0.25) }
    }

    /// `β = 2`, `p = 3/4`. The b-marginal of this state is negative near the
    /// origin; see [`marginal_b_positivity_threshold`].
    pub fn printed_figure() -> Self {
        Self { beta: Complex::new(T::two(), T::zero()), p: T::lit(0.75) }
    }

    /// Same state with the branch weights exchanged, `p → 1 − p`.
    pub fn complementary(&self) -> Self {
        Self { beta: self.beta, p: T::one() - self.p }
    }
}

fn two_over_pi<T: Scalar>() -> T {
    T::two() / T::PI()
}

/// Joint P function at `(α_a, α_b)`.
pub fn p_full<T: Scalar>(params: &MixtureParams<T>, alpha_a: Complex<T>, alpha_b: Complex<T>) -> T {
    let two = T::two();
    let nb = alpha_b.norm_sqr();
    let photon = (T::lit(4.0) * nb - T::one()) * (-two * (alpha_a - params.beta).norm_sqr() - two * nb).exp();
    let vacuum = (-two * (alpha_a + params.beta).norm_sqr() - two * nb).exp();
    let norm = two_over_pi::<T>();
    norm * norm * (params.p * photon + (T::one() - params.p) * vacuum)
}

/// P function of mode `a` alone: two displaced noisy coherent states.
pub fn p_marginal_a<T: Scalar>(params: &MixtureParams<T>, alpha_a: Complex<T>) -> T {
    let two = T::two();
    let p = params.p;
    two_over_pi::<T>()
        * (p * (-two * (alpha_a - params.beta).norm_sqr()).exp()
            + (T::one() - p) * (-two * (alpha_a + params.beta).norm_sqr()).exp())
}

/// P function of mode `b` alone: noisy single photon mixed with vacuum.
pub fn p_marginal_b<T: Scalar>(params: &MixtureParams<T>, alpha_b: Complex<T>) -> T {
    let nb = alpha_b.norm_sqr();
    let p = params.p;
    two_over_pi::<T>() * (-T::two() * nb).exp() * (p * (T::lit(4.0) * nb - T::one()) + T::one() - p)
}

/// Supremum of the weights `p` for which the b-marginal is nonnegative
/// everywhere. The bracket `p(4|α|² − 1) + 1 − p` is smallest at the origin,
/// where it equals `1 − 2p`.
pub fn marginal_b_positivity_threshold<T: Scalar>() -> T {
    T::half()
}

/// Gaussian smoothing of [`p_full`] with kernel `e^{−|α−γ|²/t} / (πt)` on each
/// complex plane; `t` is the variance added to every quadrature.
///
/// A plane Gaussian of width `s` convolves to width `s' = s + t`, and
/// `|γ|² g_s` maps to `g_{s'}(α)(|α|² s²/s'² + s t/s')`. With `s = ½`:
///
/// ```text
/// P_t = p g(α_a − β) g(α_b)(|α_b|²/s'² + 2t/s' − 1) + (1 − p) g(α_a + β) g(α_b)
/// g(z) = e^{−|z|²/s'} / (π s')
/// ```
pub fn smoothed_p<T: Scalar>(params: &MixtureParams<T>, t: T, alpha_a: Complex<T>, alpha_b: Complex<T>) -> Result<T> {
    if t.is_nan() || t <= T::zero() || !t.is_finite() {
        return Err(Error::Domain(format!("smoothing parameter must be positive, got {t}")));
    }
    let width = T::half() + t;
    let g = |z: Complex<T>| (-z.norm_sqr() / width).exp() / (T::PI() * width);
    let nb = alpha_b.norm_sqr();
    let gb = g(alpha_b);
    let photon = g(alpha_a - params.beta) * gb * (nb / (width * width) + T::two() * t / width - T::one());
    let vacuum = g(alpha_a + params.beta) * gb;
    Ok(params.p * photon + (T::one() - params.p) * vacuum)
}

/// A square grid of `points × points` samples centered on `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridSpec<T> {
    pub center: Complex<T>,
    pub half_width: T,
    pub points_per_axis: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(center: Complex<T>, half_width: T, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::InvalidConfig(format!("points_per_axis = {points_per_axis} must be at least 2")));
        }
        if half_width.is_nan() || half_width <= T::zero() || !half_width.is_finite() {
            return Err(Error::InvalidConfig(format!("half_width = {half_width} must be positive")));
        }
        Ok(Self { center, half_width, points_per_axis })
    }

    /// Half-width 4, 161 points per axis, centered at the origin.
    pub fn cut_default() -> Self {
        Self { center: Complex::new(T::zero(), T::zero()), half_width: T::lit(4.0), points_per_axis: 161 }
    }

    /// Offsets from the center, evenly spaced over `[−half_width, half_width]`.
    pub fn offsets(&self) -> Vec<T> {
        let n = self.points_per_axis;
        let step = T::two() * self.half_width / T::lit((n - 1) as f64);
        (0..n).map(|i| -self.half_width + step * T::lit(i as f64)).collect()
    }
}

/// Samples of a real function on a 2D grid, row-major in the first axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FieldSlice<T> {
    pub x_label: String,
    pub y_label: String,
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    /// `values[i * ys.len() + j]` is the sample at `(xs[i], ys[j])`.
    pub values: Vec<T>,
    pub min: T,
    pub argmin: (T, T),
}

/// JSON summary written next to a slice's CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SliceSummary<T> {
    pub min: T,
    pub argmin: (T, T),
    pub grid: SliceGrid<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SliceGrid<T> {
    pub x_label: String,
    pub y_label: String,
    pub x_range: (T, T),
    pub y_range: (T, T),
    pub shape: (usize, usize),
}

impl<T: Scalar> FieldSlice<T> {
    pub fn sample(&self, i: usize, j: usize) -> T {
        self.values[i * self.ys.len() + j]
    }

    /// `x_label,y_label,P` header, then one row per sample with 9
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str(&format!("{},{},P\n", self.x_label, self.y_label));
        for (i, x) in self.xs.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                out.push_str(&format!("{:.8e},{:.8e},{:.8e}\n", x, y, self.sample(i, j)));
            }
        }
        out
    }

    pub fn summary(&self) -> SliceSummary<T> {
        let first = |v: &[T]| v.first().copied().unwrap_or_else(T::zero);
        let last = |v: &[T]| v.last().copied().unwrap_or_else(T::zero);
        SliceSummary {
            min: self.min,
            argmin: self.argmin,
            grid: SliceGrid {
                x_label: self.x_label.clone(),
                y_label: self.y_label.clone(),
                x_range: (first(&self.xs), last(&self.xs)),
                y_range: (first(&self.ys), last(&self.ys)),
                shape: (self.xs.len(), self.ys.len()),
            },
        }
    }
}

fn scan<T, F>(xs: Vec<T>, ys: Vec<T>, labels: (&str, &str), f: F) -> FieldSlice<T>
where
    T: Scalar,
    F: Fn(T, T) -> T + Sync,
{
    let rows: Vec<Vec<T>> = xs.par_iter().map(|&x| ys.iter().map(|&y| f(x, y)).collect()).collect();
    let values: Vec<T> = rows.into_iter().flatten().collect();
    // First occurrence in row-major order, independent of thread count.
    let (mut min, mut at) = (T::infinity(), 0);
    for (k, &v) in values.iter().enumerate() {
        if v < min {
            min = v;
            at = k;
        }
    }
    let argmin = (xs[at / ys.len()], ys[at % ys.len()]);
    FieldSlice { x_label: labels.0.into(), y_label: labels.1.into(), xs, ys, values, min, argmin }
}

/// Cut of [`p_full`] along `Im α_a = Im α_b = 0` (relative to the grid
/// centers), with `α_ar` on the first axis.
pub fn scan_cut<T: Scalar>(params: &MixtureParams<T>, grid_a: &GridSpec<T>, grid_b: &GridSpec<T>) -> FieldSlice<T> {
    let xs: Vec<T> = grid_a.offsets().into_iter().map(|d| grid_a.center.re + d).collect();
    let ys: Vec<T> = grid_b.offsets().into_iter().map(|d| grid_b.center.re + d).collect();
    let (ia, ib) = (grid_a.center.im, grid_b.center.im);
    scan(xs, ys, ("alpha_ar", "alpha_br"), |x, y| p_full(params, Complex::new(x, ia), Complex::new(y, ib)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

/// One marginal over its full complex plane, real part on the first axis.
pub fn scan_marginal<T: Scalar>(params: &MixtureParams<T>, mode: Mode, grid: &GridSpec<T>) -> FieldSlice<T> {
    let xs: Vec<T> = grid.offsets().into_iter().map(|d| grid.center.re + d).collect();
    let ys: Vec<T> = grid.offsets().into_iter().map(|d| grid.center.im + d).collect();
    scan(xs, ys, ("alpha_r", "alpha_i"), |x, y| {
        let alpha = Complex::new(x, y);
        match mode {
            Mode::A => p_marginal_a(params, alpha),
            Mode::B => p_marginal_b(params, alpha),
        }
    })
}

/// Settings of the grid test inside [`depth_of_mixture_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthSearch<T> {
    pub half_width: T,
    pub points_per_axis: usize,
    pub tolerance: T,
}

impl<T: Scalar> Default for DepthSearch<T> {
    fn default() -> Self {
        Self { half_width: T::lit(6.0), points_per_axis: 241, tolerance: T::lit(1e-4) }
    }
}

/// The sign of the (smoothed) P function depends on `α_a` only through
/// `Re(α_a β̄)` and on `α_b` only through `|α_b|`, so the plane spanned by
/// `β/|β|` in mode `a` and the real axis in mode `b` sees every sign the
/// four-dimensional function takes.
fn plane_min<T: Scalar>(params: &MixtureParams<T>, t: T, search: &DepthSearch<T>) -> T {
    let norm = params.beta.norm();
    let dir = if norm > T::zero() { params.beta / norm } else { Complex::new(T::one(), T::zero()) };
    let grid = GridSpec {
        center: Complex::new(T::zero(), T::zero()),
        half_width: search.half_width,
        points_per_axis: search.points_per_axis,
    };
    let axis = grid.offsets();
    let slice = scan(axis.clone(), axis, ("s_a", "alpha_br"), |x, y| {
        let (aa, ab) = (dir * x, Complex::new(y, T::zero()));
        if t > T::zero() {
            smoothed_p(params, t, aa, ab).unwrap_or_else(|_| T::nan())
        } else {
            p_full(params, aa, ab)
        }
    });
    slice.min
}

/// Smallest smoothing `t ∈ [0, 1]` after which the grid minimum of the
/// smoothed P function is nonnegative, by bisection on `t`.
pub fn depth_of_mixture<T: Scalar>(params: &MixtureParams<T>) -> Result<T> {
    depth_of_mixture_with(params, &DepthSearch::default())
}

pub fn depth_of_mixture_with<T: Scalar>(params: &MixtureParams<T>, search: &DepthSearch<T>) -> Result<T> {
    let positive = |t: T| plane_min(params, t, search) >= T::zero();
    if positive(T::zero()) {
        return Ok(T::zero());
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    if !positive(hi) {
        return Err(Error::Bracket(format!("smoothed P still negative at t = {hi}")));
    }
    while hi - lo > search.tolerance {
        let mid = (lo + hi) * T::half();
        if positive(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn joint_value_at_photon_center() {
        let params = MixtureParams::demo();
        let k = 4.0 / (PI * PI);
        let want = -0.25 * k + 0.75 * k * (-32f64).exp();
        assert_abs_diff_eq!(p_full(&params, c(2.0, 0.0), c(0.0, 0.0)), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, -0.101321, epsilon = 1e-6);
    }

    #[test]
    fn no_photon_branch_is_gaussian() {
        let params = MixtureParams::real(2.0, 0.0).unwrap();
        for (a, b) in [(c(0.3, -1.0), c(0.2, 0.1)), (c(-2.0, 0.0), c(0.0, 0.0)), (c(4.0, 1.0), c(-3.0, 2.0))] {
            let want = 4.0 / (PI * PI) * (-2.0 * (a + c(2.0, 0.0)).norm_sqr() - 2.0 * b.norm_sqr()).exp();
            assert_abs_diff_eq!(p_full(&params, a, b), want, epsilon = 1e-15);
            assert!(p_full(&params, a, b) >= 0.0);
        }
    }

    #[test]
    fn marginal_b_at_origin() {
        assert_abs_diff_eq!(p_marginal_b(&MixtureParams::demo(), c(0.0, 0.0)), 1.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(p_marginal_b(&MixtureParams::printed_figure(), c(0.0, 0.0)), -1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn threshold_brackets_marginal_positivity() {
        assert_eq!(marginal_b_positivity_threshold::<f64>(), 0.5);
        let grid = GridSpec::new(c(0.0, 0.0), 4.0, 161).unwrap();
        let below = scan_marginal(&MixtureParams::real(2.0, 0.49).unwrap(), Mode::B, &grid);
        assert!(below.min >= 0.0);
        let above = scan_marginal(&MixtureParams::real(2.0, 0.51).unwrap(), Mode::B, &grid);
        assert!(above.min < 0.0);
    }

    #[test]
    fn marginal_a_is_positive() {
        let grid = GridSpec::new(c(0.0, 0.0), 5.0, 81).unwrap();
        for p in [0.0, 0.3, 0.75, 1.0] {
            let s = scan_marginal(&MixtureParams::real(2.0, p).unwrap(), Mode::A, &grid);
            assert!(s.min >= 0.0);
        }
    }

    #[test]
    fn demo_cut_has_negative_region_near_photon_center() {
        let params = MixtureParams::demo();
        let g = GridSpec::cut_default();
        let s = scan_cut(&params, &g, &g);
        assert!(s.min < 0.0);
        assert_abs_diff_eq!(s.argmin.0, 2.0, epsilon = 0.1);
        assert_abs_diff_eq!(s.argmin.1, 0.0, epsilon = 0.1);
        let fine = GridSpec::new(c(0.0, 0.0), 4.0, 321).unwrap();
        assert!((scan_cut(&params, &fine, &fine).min - s.min).abs() < 1e-3);
    }

    #[test]
    fn cut_without_photon_is_nonnegative() {
        let g = GridSpec::cut_default();
        assert!(scan_cut(&MixtureParams::real(2.0, 0.0).unwrap(), &g, &g).min >= 0.0);
    }

    #[test]
    fn csv_layout() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 3).unwrap();
        let csv = scan_cut(&MixtureParams::demo(), &g, &g).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha_ar,alpha_br,P");
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("-1.00000000e0,-1.00000000e0,"));
    }

    #[test]
    fn smoothing_tends_to_the_original() {
        let params = MixtureParams::demo();
        for (a, b) in [(c(2.0, 0.0), c(0.0, 0.0)), (c(-1.5, 0.4), c(0.7, -0.2)), (c(0.1, 0.1), c(0.4, 0.0))] {
            let s = smoothed_p(&params, 1e-4, a, b).unwrap();
            assert!((s - p_full(&params, a, b)).abs() < 1e-4);
        }
        assert!(smoothed_p(&params, 0.0, c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn smoothing_past_one_half_removes_negativity() {
        let params = MixtureParams::demo();
        assert!(plane_min(&params, 0.6, &DepthSearch::<f64>::default()) >= 0.0);
        assert!(plane_min(&params, 0.4, &DepthSearch::default()) < 0.0);
        let gaussian = MixtureParams::real(2.0, 0.0).unwrap();
        assert!(plane_min(&gaussian, 0.05, &DepthSearch::default()) >= 0.0);
    }

    #[test]
    fn mixture_depths() {
        assert_eq!(depth_of_mixture(&MixtureParams::real(2.0, 0.0).unwrap()).unwrap(), 0.0);
        // Noisy single photon: the bracket at the origin is (t − ½)/(t + ½).
        let photon = depth_of_mixture(&MixtureParams::real(0.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(photon, 0.5, epsilon = 1e-4);
        let low: f64 = depth_of_mixture(&MixtureParams::demo()).unwrap();
        let high = depth_of_mixture(&MixtureParams::printed_figure()).unwrap();
        assert!(low <= high);
        assert!(low > 0.0 && high <= 0.5 + 1e-4);
    }

    #[test]
    fn bad_params() {
        assert!(MixtureParams::real(2.0, 1.5).is_err());
        assert!(MixtureParams::real(2.0, f64::NAN).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 1).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), -1.0, 5).is_err());
    }
}
