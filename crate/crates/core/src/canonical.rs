//! Local Gaussian unitaries that strip a two-mode Gaussian state of every
//! nonclassical feature except entanglement.
//!
//! [`reduce_to_standard_form`] zeroes all moments but `m1, m2, n1, n2, c1,
//! c2`. [`solve_squeezings`] then picks local squeezings `s_a, s_b` so that
//!
//! ```text
//! (m1' − ½)(n2' − ½) = (n1' − ½)(m2' − ½)                          (balance)
//! √((m1' − ½)(n1' − ½)) − √((m2' − ½)(n2' − ½)) = |c1'| − |c2'|    (coincidence)
//! ```
//!
//! After that the state has a positive P function exactly when it is
//! separable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    det2, identity2, rotation2, to_standard_moments, transpose2, Block, CovarianceMatrix, LocalSymplectic,
    StandardMoments,
};
use crate::measures::gaussian_p_positive;
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 200;
const START_COUNT: usize = 4;
const SCAN_POINTS: usize = 256;

/// How [`solve_squeezings`] obtained its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Conditions already held at `s_a = s_b = 1`, or a mode is pure and the
    /// solution manifold is degenerate.
    Identity,
    Newton,
    /// Bisection along the curve on which the balance condition holds.
    CurveBisection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CanonicalResult<T> {
    /// Moments after the accumulated transform.
    pub moments: StandardMoments<T>,
    /// Local transform taking the input to `moments`.
    pub transform: LocalSymplectic<T>,
    /// Squeezing factors `(s_a, s_b)` of the final step.
    pub squeezing: (T, T),
    pub residual_11: T,
    pub residual_14: T,
    pub converged: bool,
    pub iterations: usize,
    pub method: SolverMethod,
    /// Every distinct `(s_a, s_b)` root found.
    pub roots: Vec<(T, T)>,
}

impl<T: Scalar> CanonicalResult<T> {
    pub fn p_positive(&self) -> bool {
        gaussian_p_positive(&self.moments)
    }
}

fn is_scaled_identity<T: Scalar>(b: &Block<T>) -> bool {
    let tol = T::standard_form_tol();
    b[0][1].abs() < tol && b[1][0].abs() < tol && (b[0][0] - b[1][1]).abs() < tol
}

/// Symplectic `S` with `S A Sᵀ = √(det A) · I`, namely `S = (det A)^{1/4} A^{-1/2}`.
fn williamson_block<T: Scalar>(a: &Block<T>) -> Block<T> {
    if is_scaled_identity(a) {
        return identity2();
    }
    let root_det = det2(a).sqrt();
    let norm = (a[0][0] + a[1][1] + T::two() * root_det).sqrt();
    // √A = (A + √det A · I) / √(tr A + 2√det A); det √A = √det A.
    let sqrt_a = [[(a[0][0] + root_det) / norm, a[0][1] / norm], [a[1][0] / norm, (a[1][1] + root_det) / norm]];
    let d = det2(&sqrt_a);
    let scale = root_det.sqrt() / d;
    [[sqrt_a[1][1] * scale, -sqrt_a[0][1] * scale], [-sqrt_a[1][0] * scale, sqrt_a[0][0] * scale]]
}

/// Rotation angles `(φ, θ)` and signed singular values `(d1, d2)`, `d1 ≥ |d2|`,
/// with `M = R(φ) diag(d1, d2) R(θ)`.
fn rotation_svd<T: Scalar>(m: &Block<T>) -> (T, T, T, T) {
    let two = T::two();
    let e = (m[0][0] + m[1][1]) / two;
    let f = (m[0][0] - m[1][1]) / two;
    let g = (m[1][0] + m[0][1]) / two;
    let h = (m[1][0] - m[0][1]) / two;
    let q = (e * e + h * h).sqrt();
    let r = (f * f + g * g).sqrt();
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    ((a2 + a1) / two, (a2 - a1) / two, q + r, q - r)
}

fn classical_standard<T: Scalar>(sigma: &CovarianceMatrix<T>) -> Option<StandardMoments<T>> {
    let m = to_standard_moments(sigma).ok()?;
    let floor = T::half() - T::boundary_tol();
    [m.m1, m.m2, m.n1, m.n2].iter().all(|&v| v >= floor).then_some(m)
}

/// Local rotations and squeezings bringing `sigma` to standard form with
/// `c1 ≥ c2`.
///
/// Inputs already in standard form with vacuum-or-noisier local variances
/// are left alone apart from the `c1 ≥ c2` quarter turn. Everything else has
/// its local blocks brought to `a·I`, `b·I` and its cross block diagonalized.
pub fn reduce_to_standard_form<T: Scalar>(
    sigma: &CovarianceMatrix<T>,
) -> Result<(StandardMoments<T>, LocalSymplectic<T>)> {
    let mut transform = LocalSymplectic::identity();
    let mut current = *sigma;

    if classical_standard(&current).is_none() {
        let normalize = LocalSymplectic {
            s_a: williamson_block(&current.local_block_a()),
            s_b: williamson_block(&current.local_block_b()),
        };
        current = current.apply_local(&normalize);
        transform = transform.then(&normalize);

        let c = current.cross_block();
        if c[0][1].abs() >= T::standard_form_tol() || c[1][0].abs() >= T::standard_form_tol() {
            let (phi, theta, _, _) = rotation_svd(&c);
            let rot = LocalSymplectic { s_a: transpose2(&rotation2(phi)), s_b: rotation2(theta) };
            current = current.apply_local(&rot);
            transform = transform.then(&rot);
        }
    }

    let mut moments = to_standard_moments(&current)?;
    if moments.c1 < moments.c2 {
        let turn = LocalSymplectic::quarter_turn();
        current = current.apply_local(&turn);
        transform = transform.then(&turn);
        moments = to_standard_moments(&current)?;
    }
    Ok((moments, transform))
}

/// Residuals of the balance and coincidence conditions in log-squeezing
/// coordinates `(U, W) = (ln s_a, ln s_b)`.
struct Conditions<T> {
    m: StandardMoments<T>,
    /// Admissible `U` and `W` keep every primed variance at or above ½.
    u_range: (T, T),
    w_range: (T, T),
}

struct Point<T> {
    xa: T,
    pa: T,
    xb: T,
    pb: T,
    k: T,
}

impl<T: Scalar> Conditions<T> {
    fn new(m: StandardMoments<T>) -> Self {
        let two = T::two();
        let u_range = ((two * m.m1).recip().ln(), (two * m.m2).ln());
        let w_range = ((two * m.n1).recip().ln(), (two * m.n2).ln());
        Self { m, u_range, w_range }
    }

    fn point(&self, u: T, w: T) -> Point<T> {
        let (su, sw) = (u.exp(), w.exp());
        let h = T::half();
        Point {
            xa: (su * self.m.m1 - h).max(T::zero()),
            pa: (self.m.m2 / su - h).max(T::zero()),
            xb: (sw * self.m.n1 - h).max(T::zero()),
            pb: (self.m.n2 / sw - h).max(T::zero()),
            k: ((u + w) * T::half()).exp(),
        }
    }

    fn residuals(&self, u: T, w: T) -> (T, T) {
        let p = self.point(u, w);
        let balance = p.xa * p.pb - p.xb * p.pa;
        let coincide = (p.xa * p.xb).sqrt() - (p.pa * p.pb).sqrt() - (self.m.c1.abs() * p.k - self.m.c2.abs() / p.k);
        (balance, coincide)
    }

    fn jacobian(&self, u: T, w: T) -> [[T; 2]; 2] {
        let (su, sw) = (u.exp(), w.exp());
        let p = self.point(u, w);
        let h = T::half();
        let (dxa, dpa) = (su * self.m.m1, -self.m.m2 / su);
        let (dxb, dpb) = (sw * self.m.n1, -self.m.n2 / sw);
        let rx = (p.xa * p.xb).sqrt();
        let rp = (p.pa * p.pb).sqrt();
        let corr = h * (self.m.c1.abs() * p.k + self.m.c2.abs() / p.k);
        [
            [dxa * p.pb - p.xb * dpa, p.xa * dpb - dxb * p.pa],
            [h * dxa * p.xb / rx - h * dpa * p.pb / rp - corr, h * dxb * p.xa / rx - h * dpb * p.pa / rp - corr],
        ]
    }

    fn inside(&self, u: T, w: T) -> bool {
        u > self.u_range.0 && u < self.u_range.1 && w > self.w_range.0 && w < self.w_range.1
    }

    fn starts(&self) -> [(T, T); START_COUNT] {
        let at = |r: (T, T), f: f64| r.0 + (r.1 - r.0) * T::lit(f);
        let origin = if self.inside(T::zero(), T::zero()) {
            (T::zero(), T::zero())
        } else {
            (at(self.u_range, 0.5), at(self.w_range, 0.5))
        };
        [
            origin,
            (at(self.u_range, 0.25), at(self.w_range, 0.25)),
            (at(self.u_range, 0.75), at(self.w_range, 0.75)),
            (at(self.u_range, 0.25), at(self.w_range, 0.75)),
        ]
    }

    /// Damped Newton from `(u, w)`. Returns the final point, the residual
    /// max-norm and the iteration count.
    fn newton(&self, mut u: T, mut w: T) -> (T, T, T, usize) {
        let norm = |r: (T, T)| r.0.abs().max(r.1.abs());
        let mut r = self.residuals(u, w);
        let floor = T::epsilon() * T::lit(16.0);
        for it in 0..MAX_ITERATIONS {
            if norm(r) <= floor {
                return (u, w, norm(r), it);
            }
            let j = self.jacobian(u, w);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == T::zero() || !det.is_finite() {
                return (u, w, norm(r), it);
            }
            let du = -(j[1][1] * r.0 - j[0][1] * r.1) / det;
            let dw = -(-j[1][0] * r.0 + j[0][0] * r.1) / det;
            let mut lambda = T::one();
            let mut accepted = false;
            while lambda > T::lit(1e-12) {
                let (nu, nw) = (u + lambda * du, w + lambda * dw);
                if self.inside(nu, nw) {
                    let nr = self.residuals(nu, nw);
                    if norm(nr) < norm(r) {
                        u = nu;
                        w = nw;
                        r = nr;
                        accepted = true;
                        break;
                    }
                }
                lambda = lambda * T::half();
            }
            if !accepted {
                return (u, w, norm(r), it + 1);
            }
        }
        (u, w, norm(r), MAX_ITERATIONS)
    }

    /// `W` on the balance curve through `U`: with `ρ = X_a/P_a`, `s_b` is
    /// the positive root of `n1 s² + (ρ − 1)s/2 − ρ n2 = 0`.
    fn balance_w(&self, u: T) -> T {
        let p = self.point(u, T::zero());
        let rho = p.xa / p.pa;
        let b = (rho - T::one()) * T::half();
        let disc = b * b + T::lit(4.0) * self.m.n1 * self.m.n2 * rho;
        let s = (-b + disc.sqrt()) / (T::two() * self.m.n1);
        s.ln()
    }

    fn curve_roots(&self) -> (Vec<(T, T)>, usize) {
        let g = |u: T| self.residuals(u, self.balance_w(u)).1;
        let (lo, hi) = self.u_range;
        let at = |i: usize| lo + (hi - lo) * T::lit((i as f64 + 0.5) / SCAN_POINTS as f64);
        let mut roots = Vec::new();
        let mut evals = 0;
        let mut prev = (at(0), g(at(0)));
        for i in 1..SCAN_POINTS {
            let x = at(i);
            let gx = g(x);
            evals += 1;
            if prev.1 == T::zero() || prev.1.signum() != gx.signum() {
                let (mut a, mut b, mut ga) = (prev.0, x, prev.1);
                for _ in 0..200 {
                    let mid = (a + b) * T::half();
                    if mid <= a || mid >= b {
                        break;
                    }
                    let gm = g(mid);
                    evals += 1;
                    if gm == T::zero() {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if gm.signum() == ga.signum() {
                        a = mid;
                        ga = gm;
                    } else {
                        b = mid;
                    }
                }
                let root = (a + b) * T::half();
                roots.push((root, self.balance_w(root)));
            }
            prev = (x, gx);
        }
        (roots, evals)
    }

    fn moments_at(&self, u: T, w: T) -> StandardMoments<T> {
        let (su, sw) = (u.exp(), w.exp());
        let k = ((u + w) * T::half()).exp();
        let m = &self.m;
        StandardMoments::from_parts_unchecked(su * m.m1, m.m2 / su, sw * m.n1, m.n2 / sw, k * m.c1, m.c2 / k)
    }
}

fn pure_mode<T: Scalar>(a: T, b: T) -> bool {
    T::lit(4.0) * a * b - T::one() <= T::boundary_tol()
}

/// Local squeezings `x_k → √s_k x_k`, `p_k → p_k/√s_k` satisfying the
/// balance and coincidence conditions.
///
/// Damped Newton in `(ln s_a, ln s_b)` is started from `s = 1` and three
/// spread points; if none converges, a scan with bisection along the
/// balance curve takes over. Distinct roots that disagree on P-positivity
/// are an error.
pub fn solve_squeezings<T: Scalar>(moments: &StandardMoments<T>) -> Result<CanonicalResult<T>> {
    let floor = T::half() - T::boundary_tol();
    for (mode, v) in [('a', moments.m1), ('a', moments.m2), ('b', moments.n1), ('b', moments.n2)] {
        if v < floor {
            return Err(Error::LocallyNonclassical { mode, value: v.as_f64() });
        }
    }
    let h = T::half();
    let m = StandardMoments::from_parts_unchecked(
        moments.m1.max(h),
        moments.m2.max(h),
        moments.n1.max(h),
        moments.n2.max(h),
        moments.c1,
        moments.c2,
    );
    let cond = Conditions::new(m);
    let tol = T::residual_tol();
    let finish = |u: T, w: T, iterations: usize, method: SolverMethod, roots: Vec<(T, T)>| {
        let (r11, r14) = cond.residuals(u, w);
        let (sa, sb) = (u.exp(), w.exp());
        CanonicalResult {
            moments: cond.moments_at(u, w),
            transform: LocalSymplectic::squeeze(sa, sb),
            squeezing: (sa, sb),
            residual_11: r11,
            residual_14: r14,
            converged: r11.abs() < tol && r14.abs() < tol,
            iterations,
            method,
            roots,
        }
    };

    // Nothing to do, or a pure mode pins its own squeezing and leaves the
    // other free: tie-break to the identity.
    let (r11, r14) = cond.residuals(T::zero(), T::zero());
    let exact = T::epsilon() * T::lit(16.0);
    let pure_a = pure_mode(m.m1, m.m2);
    let pure_b = pure_mode(m.n1, m.n2);
    if (r11.abs() <= exact && r14.abs() <= exact) || pure_a || pure_b {
        let clamp = |r: (T, T)| T::zero().max(r.0).min(r.1);
        let (u, w) = (clamp(cond.u_range), clamp(cond.w_range));
        return Ok(finish(u, w, 0, SolverMethod::Identity, vec![(u.exp(), w.exp())]));
    }

    let mut roots: Vec<(T, T)> = Vec::new();
    let mut iterations = 0;
    let mut best: Option<(T, T, T)> = None;
    for (u0, w0) in cond.starts() {
        let (u, w, res, its) = cond.newton(u0, w0);
        iterations += its;
        if best.is_none_or(|b| res < b.2) {
            best = Some((u, w, res));
        }
        if res < tol {
            push_distinct(&mut roots, (u, w));
        }
    }
    let method = if roots.is_empty() {
        let (found, evals) = cond.curve_roots();
        iterations += evals;
        for (u, w) in found {
            let (a, b) = cond.residuals(u, w);
            if a.abs().max(b.abs()) < tol {
                push_distinct(&mut roots, (u, w));
            }
        }
        SolverMethod::CurveBisection
    } else {
        SolverMethod::Newton
    };

    if roots.is_empty() {
        let (u, w, _) = best.unwrap_or((T::zero(), T::zero(), T::infinity()));
        let (a, b) = cond.residuals(u, w);
        return Err(Error::NoConvergence { residual_11: a.as_f64(), residual_14: b.as_f64() });
    }

    let verdicts: Vec<bool> = roots.iter().map(|&(u, w)| gaussian_p_positive(&cond.moments_at(u, w))).collect();
    if verdicts.iter().any(|&v| v != verdicts[0]) {
        return Err(Error::AmbiguousRoots {
            roots: roots.iter().map(|&(u, w)| (u.exp().as_f64(), w.exp().as_f64())).collect(),
        });
    }
    roots.sort_by(|a, b| {
        let da = a.0 * a.0 + a.1 * a.1;
        let db = b.0 * b.0 + b.1 * b.1;
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
    });
    let (u, w) = roots[0];
    let all = roots.iter().map(|&(u, w)| (u.exp(), w.exp())).collect();
    Ok(finish(u, w, iterations, method, all))
}

fn push_distinct<T: Scalar>(roots: &mut Vec<(T, T)>, r: (T, T)) {
    let close = T::lit(1e-6);
    if !roots.iter().any(|q| (q.0 - r.0).abs() < close && (q.1 - r.1).abs() < close) {
        roots.push(r);
    }
}

/// [`reduce_to_standard_form`] followed by [`solve_squeezings`]; the returned
/// transform maps `sigma` itself to the canonical moments.
pub fn canonicalize<T: Scalar>(sigma: &CovarianceMatrix<T>) -> Result<CanonicalResult<T>> {
    let (moments, reduce) = reduce_to_standard_form(sigma)?;
    let mut result = solve_squeezings(&moments)?;
    result.transform = reduce.then(&result.transform);
    Ok(result)
}
