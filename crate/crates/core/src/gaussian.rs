//! Second-moment description of two-mode Gaussian states.
//!
//! Quadratures obey `[x, p] = i`, so the vacuum has variance 1/2 in every
//! quadrature. Rows and columns are ordered `(x_a, p_a, x_b, p_b)`.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A 2×2 block acting on the `(x, p)` pair of one mode.
pub type Block<T> = [[T; 2]; 2];
/// Raw row-major 4×4 matrix.
pub type Matrix4<T> = [[T; 4]; 4];

pub(crate) fn identity2<T: Scalar>() -> Block<T> {
    [[T::one(), T::zero()], [T::zero(), T::one()]]
}

pub(crate) fn mul2<T: Scalar>(a: &Block<T>, b: &Block<T>) -> Block<T> {
    let mut out = [[T::zero(); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn transpose2<T: Scalar>(a: &Block<T>) -> Block<T> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub(crate) fn det2<T: Scalar>(a: &Block<T>) -> T {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Counter-clockwise phase-space rotation by `theta`.
pub(crate) fn rotation2<T: Scalar>(theta: T) -> Block<T> {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

pub(crate) fn mul4<T: Scalar>(a: &Matrix4<T>, b: &Matrix4<T>) -> Matrix4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = T::zero();
            for k in 0..4 {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub(crate) fn transpose4<T: Scalar>(a: &Matrix4<T>) -> Matrix4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// `S M Sᵀ`.
pub(crate) fn congruence<T: Scalar>(s: &Matrix4<T>, m: &Matrix4<T>) -> Matrix4<T> {
    mul4(&mul4(s, m), &transpose4(s))
}

pub(crate) fn det4<T: Scalar>(m: &Matrix4<T>) -> T {
    // Laplace expansion along the first two rows via complementary 2×2 minors.
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let s0 = minor(0, 1, 0, 1);
    let s1 = minor(0, 1, 0, 2);
    let s2 = minor(0, 1, 0, 3);
    let s3 = minor(0, 1, 1, 2);
    let s4 = minor(0, 1, 1, 3);
    let s5 = minor(0, 1, 2, 3);
    let c5 = minor(2, 3, 0, 1);
    let c4 = minor(2, 3, 0, 2);
    let c3 = minor(2, 3, 0, 3);
    let c2 = minor(2, 3, 1, 2);
    let c1 = minor(2, 3, 1, 3);
    let c0 = minor(2, 3, 2, 3);
    s0 * c0 - s1 * c1 + s2 * c2 + s3 * c3 - s4 * c4 + s5 * c5
}

fn block<T: Scalar>(m: &Matrix4<T>, r: usize, c: usize) -> Block<T> {
    [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]]
}

/// Both symplectic eigenvalues `(ν₋, ν₊)` of a two-mode covariance matrix,
/// from the local invariants `det A`, `det B`, `det C` and `det σ`.
///
/// `flip_cross` negates `det C`, which yields the eigenvalues of the
/// partially transposed matrix without forming it.
pub(crate) fn symplectic_pair<T: Scalar>(m: &Matrix4<T>, flip_cross: bool) -> (T, T) {
    let m = if flip_cross { partial_transpose_rows(m) } else { *m };
    if positive_definite(&m) {
        symplectic_pair_jacobi(&m)
    } else {
        symplectic_pair_closed(&m)
    }
}

fn partial_transpose_rows<T: Scalar>(m: &Matrix4<T>) -> Matrix4<T> {
    let mut out = *m;
    for i in 0..4 {
        if i != 3 {
            out[i][3] = -out[i][3];
            out[3][i] = -out[3][i];
        }
    }
    out
}

// Δ = det A + det B + 2 det C, ν±² = (Δ ± √(Δ² − 4 det σ)) / 2. Loses about
// half the digits when ν₋ ≈ ν₊, so only used when σ is not positive definite.
fn symplectic_pair_closed<T: Scalar>(m: &Matrix4<T>) -> (T, T) {
    let two = T::two();
    let a = det2(&block(m, 0, 0));
    let b = det2(&block(m, 2, 2));
    let c = det2(&block(m, 0, 2));
    let delta = a + b + two * c;
    let det = det4(m);
    let disc = (delta * delta - T::lit(4.0) * det).max(T::zero());
    let plus_sq = (delta + disc.sqrt()) / two;
    let minus_sq = if plus_sq > T::zero() { det / plus_sq } else { T::zero() };
    (minus_sq.max(T::zero()).sqrt(), plus_sq.max(T::zero()).sqrt())
}

// With K = σ^{1/2} Ω σ^{1/2}, KᵀK has eigenvalues ν₋², ν₋², ν₊², ν₊².
fn symplectic_pair_jacobi<T: Scalar>(m: &Matrix4<T>) -> (T, T) {
    let (vals, vecs) = jacobi_eigen(m);
    let mut root = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = T::zero();
            for k in 0..4 {
                s = s + vecs[i][k] * vals[k].max(T::zero()).sqrt() * vecs[j][k];
            }
            root[i][j] = s;
        }
    }
    let mut omega = [[T::zero(); 4]; 4];
    omega[0][1] = T::one();
    omega[1][0] = -T::one();
    omega[2][3] = T::one();
    omega[3][2] = -T::one();
    let k = mul4(&mul4(&root, &omega), &root);
    let mut ktk = mul4(&transpose4(&k), &k);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let s = (ktk[i][j] + ktk[j][i]) / T::two();
            ktk[i][j] = s;
            ktk[j][i] = s;
        }
    }
    let (mut sq, _) = jacobi_eigen(&ktk);
    sq.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let lo = ((sq[0] + sq[1]) / T::two()).max(T::zero()).sqrt();
    let hi = ((sq[2] + sq[3]) / T::two()).max(T::zero()).sqrt();
    (lo, hi)
}

/// Cyclic Jacobi eigen-solve of a symmetric 4×4 matrix. Column `k` of the
/// returned matrix is the eigenvector for eigenvalue `k`.
pub(crate) fn jacobi_eigen<T: Scalar>(m: &Matrix4<T>) -> ([T; 4], Matrix4<T>) {
    let mut a = *m;
    let mut v = [[T::zero(); 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for _sweep in 0..64 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..4 {
            diag = diag + a[i][i] * a[i][i];
            for j in (i + 1)..4 {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2], a[3][3]], v)
}

fn check_finite<T: Scalar>(m: &Matrix4<T>) -> Result<()> {
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn max_asymmetry<T: Scalar>(m: &Matrix4<T>) -> T {
    let mut worst = T::zero();
    for i in 0..4 {
        for j in (i + 1)..4 {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

fn positive_definite<T: Scalar>(m: &Matrix4<T>) -> bool {
    // Sylvester's criterion on the leading principal minors.
    let d1 = m[0][0];
    let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let d3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    d1 > T::zero() && d2 > T::zero() && d3 > T::zero() && det4(m) > T::zero()
}

/// Outcome of [`validate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport<T> {
    pub symmetric: bool,
    pub positive_definite: bool,
    pub physical: bool,
    /// `(ν₋, ν₊)`, ascending.
    pub symplectic_eigenvalues: [T; 2],
    pub max_asymmetry: T,
}

/// Check symmetry, positivity and the uncertainty relation of a raw matrix.
///
/// Asymmetry beyond [`Scalar::symmetry_tol`] is an error; an unphysical but
/// symmetric matrix is reported, not rejected.
pub fn validate<T: Scalar>(sigma: &Matrix4<T>) -> Result<ValidationReport<T>> {
    check_finite(sigma)?;
    let asym = max_asymmetry(sigma);
    if asym > T::symmetry_tol() {
        return Err(Error::Asymmetric { max_asymmetry: asym.as_f64() });
    }
    let sym = symmetrized(sigma);
    let pd = positive_definite(&sym);
    let (lo, hi) = symplectic_pair(&sym, false);
    Ok(ValidationReport {
        symmetric: true,
        positive_definite: pd,
        physical: pd && lo >= T::half() - T::physical_tol(),
        symplectic_eigenvalues: [lo, hi],
        max_asymmetry: asym,
    })
}

fn symmetrized<T: Scalar>(m: &Matrix4<T>) -> Matrix4<T> {
    let mut out = *m;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = (m[i][j] + m[j][i]) * T::half();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Serialized form `{"sigma": [[..], [..], [..], [..]]}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCovariance<T> {
    pub sigma: Matrix4<T>,
}

/// Covariance matrix of a physical two-mode Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCovariance<T>", into = "RawCovariance<T>")]
#[serde(bound = "T: Scalar")]
pub struct CovarianceMatrix<T> {
    sigma: Matrix4<T>,
}

impl<T: Scalar> TryFrom<RawCovariance<T>> for CovarianceMatrix<T> {
    type Error = Error;

    fn try_from(raw: RawCovariance<T>) -> Result<Self> {
        Self::new(raw.sigma)
    }
}

impl<T: Scalar> From<CovarianceMatrix<T>> for RawCovariance<T> {
    fn from(cm: CovarianceMatrix<T>) -> Self {
        RawCovariance { sigma: cm.sigma }
    }
}

impl<T: Scalar> CovarianceMatrix<T> {
    /// Validate and wrap a row-major matrix. The stored matrix is exactly
    /// symmetric (tiny asymmetries are averaged out).
    pub fn new(sigma: Matrix4<T>) -> Result<Self> {
        let report = validate(&sigma)?;
        if !report.physical {
            return Err(Error::Unphysical { min_symplectic: report.symplectic_eigenvalues[0].as_f64() });
        }
        Ok(Self { sigma: symmetrized(&sigma) })
    }

    /// Wrap a matrix produced by a symplectic map of a physical state.
    /// Only symmetrizes; callers guarantee physicality.
    pub(crate) fn from_trusted(sigma: Matrix4<T>) -> Self {
        Self { sigma: symmetrized(&sigma) }
    }

    pub fn vacuum() -> Self {
        Self::thermal(T::zero(), T::zero())
    }

    /// Product of thermal states with mean photon numbers `n_a`, `n_b`.
    pub fn thermal(n_a: T, n_b: T) -> Self {
        let va = n_a + T::half();
        let vb = n_b + T::half();
        let z = T::zero();
        Self { sigma: [[va, z, z, z], [z, va, z, z], [z, z, vb, z], [z, z, z, vb]] }
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn tmsv(r: T) -> Self {
        Self::squeezed_thermal(r, T::zero(), T::zero())
    }

    /// Two-mode squeezer with parameter `r` acting on a product of thermal
    /// states with occupations `n_a`, `n_b`.
    pub fn squeezed_thermal(r: T, n_a: T, n_b: T) -> Self {
        let th = Self::thermal(n_a, n_b);
        let (c, s) = (r.cosh(), r.sinh());
        let z = T::zero();
        let sq = [[c, z, s, z], [z, c, z, -s], [s, z, c, z], [z, -s, z, c]];
        Self::from_trusted(congruence(&sq, &th.sigma))
    }

    /// Product of single-mode squeezed vacua, `x_k → √s_k x_k`.
    pub fn local_squeezed_vacuum(s_a: T, s_b: T) -> Self {
        Self::vacuum().apply_local(&LocalSymplectic::squeeze(s_a, s_b))
    }

    /// Standard-form matrix built from the six moments.
    pub fn from_moments(m: &StandardMoments<T>) -> Self {
        Self { sigma: m.embed() }
    }

    pub fn as_rows(&self) -> &Matrix4<T> {
        &self.sigma
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.sigma[row][col]
    }

    pub fn local_block_a(&self) -> Block<T> {
        block(&self.sigma, 0, 0)
    }

    pub fn local_block_b(&self) -> Block<T> {
        block(&self.sigma, 2, 2)
    }

    pub fn cross_block(&self) -> Block<T> {
        block(&self.sigma, 0, 2)
    }

    pub fn determinant(&self) -> T {
        det4(&self.sigma)
    }

    /// `(ν₋, ν₊)` in ascending order.
    pub fn symplectic_eigenvalues(&self) -> (T, T) {
        symplectic_pair(&self.sigma, false)
    }

    /// Symplectic eigenvalues of the partial transpose (sign flip of `p_b`).
    pub fn pt_symplectic_eigenvalues(&self) -> (T, T) {
        symplectic_pair(&self.sigma, true)
    }

    /// Raw matrix of the partial transpose; not a valid state in general.
    pub fn partial_transpose(&self) -> Matrix4<T> {
        let mut out = self.sigma;
        for i in 0..4 {
            out[i][3] = -out[i][3];
            out[3][i] = -out[3][i];
        }
        out
    }

    /// Logarithmic negativity `max(0, −log₂(2ν̃₋))` from the smallest
    /// symplectic eigenvalue of the partial transpose. Valid for any
    /// two-mode covariance matrix, standard form or not.
    pub fn log_negativity(&self) -> T {
        let (nu, _) = self.pt_symplectic_eigenvalues();
        (-(T::two() * nu).log2()).max(T::zero())
    }

    /// `σ → S σ Sᵀ` with `S = s_a ⊕ s_b`. Symplectic eigenvalues are preserved.
    pub fn apply_local(&self, t: &LocalSymplectic<T>) -> Self {
        Self::from_trusted(congruence(&t.as_matrix(), &self.sigma))
    }

    /// Mix the modes on a beam splitter with transmissivity `cos²θ`.
    pub fn beam_splitter(&self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        let z = T::zero();
        let bs = [[c, z, s, z], [z, c, z, s], [-s, z, c, z], [z, -s, z, c]];
        Self::from_trusted(congruence(&bs, &self.sigma))
    }

    /// Raise every quadrature variance by `t` (isotropic Gaussian noise).
    pub fn add_noise(&self, t: T) -> Result<Self> {
        let mut out = self.sigma;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = row[i] + t;
        }
        Self::new(out)
    }
}

/// Validate `sigma` and extract the six standard-form moments.
pub fn to_standard_moments<T: Scalar>(sigma: &CovarianceMatrix<T>) -> Result<StandardMoments<T>> {
    const OFF: [(usize, usize); 4] = [(0, 1), (2, 3), (0, 3), (1, 2)];
    let mut worst: Option<(usize, usize, T)> = None;
    for &(i, j) in &OFF {
        let v = sigma.get(i, j);
        if v.abs() >= T::standard_form_tol() && worst.is_none_or(|(_, _, w)| v.abs() > w.abs()) {
            worst = Some((i, j, v));
        }
    }
    if let Some((row, col, value)) = worst {
        return Err(Error::NonStandardForm { row, col, value: value.as_f64() });
    }
    let s = sigma.as_rows();
    Ok(StandardMoments::from_parts_unchecked(s[0][0], s[1][1], s[2][2], s[3][3], s[0][2], s[1][3]))
}

/// Serialized moments `{"m1", "m2", "n1", "n2", "c1", "c2"}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawMoments<T> {
    pub m1: T,
    pub m2: T,
    pub n1: T,
    pub n2: T,
    pub c1: T,
    pub c2: T,
}

/// The six surviving second moments of a standard-form state:
/// `m1 = ⟨x_a²⟩`, `m2 = ⟨p_a²⟩`, `n1 = ⟨x_b²⟩`, `n2 = ⟨p_b²⟩`,
/// `c1 = ⟨x_a x_b⟩`, `c2 = ⟨p_a p_b⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoments<T>", into = "RawMoments<T>")]
#[serde(bound = "T: Scalar")]
pub struct StandardMoments<T> {
    pub(crate) m1: T,
    pub(crate) m2: T,
    pub(crate) n1: T,
    pub(crate) n2: T,
    pub(crate) c1: T,
    pub(crate) c2: T,
}

impl<T: Scalar> TryFrom<RawMoments<T>> for StandardMoments<T> {
    type Error = Error;

    fn try_from(r: RawMoments<T>) -> Result<Self> {
        Self::new(r.m1, r.m2, r.n1, r.n2, r.c1, r.c2)
    }
}

impl<T: Scalar> From<StandardMoments<T>> for RawMoments<T> {
    fn from(m: StandardMoments<T>) -> Self {
        RawMoments { m1: m.m1, m2: m.m2, n1: m.n1, n2: m.n2, c1: m.c1, c2: m.c2 }
    }
}

impl<T: Scalar> StandardMoments<T> {
    pub fn new(m1: T, m2: T, n1: T, n2: T, c1: T, c2: T) -> Result<Self> {
        let m = Self::from_parts_unchecked(m1, m2, n1, n2, c1, c2);
        for (name, v) in [("m1", m1), ("m2", m2), ("n1", n1), ("n2", n2), ("c1", c1), ("c2", c2)] {
            if !v.is_finite() {
                return Err(Error::InvalidMoments(format!("{name} is not finite")));
            }
        }
        for (name, v) in [("m1", m1), ("m2", m2), ("n1", n1), ("n2", n2)] {
            if v <= T::zero() {
                return Err(Error::InvalidMoments(format!("{name} = {v} must be positive")));
            }
        }
        let quarter = T::lit(0.25);
        let slack = T::physical_tol();
        if m1 * m2 < quarter - slack || n1 * n2 < quarter - slack {
            return Err(Error::InvalidMoments(format!(
                "local uncertainty violated: m1·m2 = {}, n1·n2 = {}",
                m1 * m2,
                n1 * n2
            )));
        }
        let (nu, _) = symplectic_pair(&m.embed(), false);
        if nu < T::half() - slack {
            return Err(Error::Unphysical { min_symplectic: nu.as_f64() });
        }
        Ok(m)
    }

    pub(crate) fn from_parts_unchecked(m1: T, m2: T, n1: T, n2: T, c1: T, c2: T) -> Self {
        Self { m1, m2, n1, n2, c1, c2 }
    }

    /// `m = m1 = m2`, `n = n1 = n2`, `c = c1 = −c2`.
    pub fn symmetric(m: T, n: T, c: T) -> Result<Self> {
        Self::new(m, m, n, n, c, -c)
    }

    pub fn m1(&self) -> T {
        self.m1
    }
    pub fn m2(&self) -> T {
        self.m2
    }
    pub fn n1(&self) -> T {
        self.n1
    }
    pub fn n2(&self) -> T {
        self.n2
    }
    pub fn c1(&self) -> T {
        self.c1
    }
    pub fn c2(&self) -> T {
        self.c2
    }

    /// `[m1, m2, n1, n2, c1, c2]`.
    pub fn to_array(&self) -> [T; 6] {
        [self.m1, self.m2, self.n1, self.n2, self.c1, self.c2]
    }

    pub(crate) fn embed(&self) -> Matrix4<T> {
        let z = T::zero();
        [[self.m1, z, self.c1, z], [z, self.m2, z, self.c2], [self.c1, z, self.n1, z], [z, self.c2, z, self.n2]]
    }

    pub fn to_covariance(&self) -> CovarianceMatrix<T> {
        CovarianceMatrix::from_moments(self)
    }

    /// Every variance raised by `t`; correlations untouched.
    pub fn with_added_noise(&self, t: T) -> Result<Self> {
        Self::new(self.m1 + t, self.m2 + t, self.n1 + t, self.n2 + t, self.c1, self.c2)
    }
}

/// Local Gaussian unitary `S = s_a ⊕ s_b`, each block with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LocalSymplectic<T> {
    pub s_a: Block<T>,
    pub s_b: Block<T>,
}

impl<T: Scalar> LocalSymplectic<T> {
    pub fn new(s_a: Block<T>, s_b: Block<T>) -> Result<Self> {
        let (da, db) = (det2(&s_a), det2(&s_b));
        let ok = |blk: &Block<T>, d: T| {
            let scale = blk.iter().flatten().fold(T::one(), |acc, v| acc.max(v.abs()));
            d.is_finite() && (d - T::one()).abs() <= T::symmetry_tol() * scale * scale
        };
        if !ok(&s_a, da) || !ok(&s_b, db) {
            return Err(Error::NotSymplectic { det_a: da.as_f64(), det_b: db.as_f64() });
        }
        Ok(Self { s_a, s_b })
    }

    pub fn identity() -> Self {
        Self { s_a: identity2(), s_b: identity2() }
    }

    /// `x_k → √s_k x_k`, `p_k → p_k / √s_k`. Both factors must be positive.
    pub fn squeeze(s_a: T, s_b: T) -> Self {
        let blk = |s: T| {
            let r = s.sqrt();
            [[r, T::zero()], [T::zero(), T::one() / r]]
        };
        Self { s_a: blk(s_a), s_b: blk(s_b) }
    }

    /// Phase rotations by `theta_a` and `theta_b`.
    pub fn rotation(theta_a: T, theta_b: T) -> Self {
        Self { s_a: rotation2(theta_a), s_b: rotation2(theta_b) }
    }

    /// Quarter-turn on both modes, `x → −p`, `p → x`: exchanges the roles of
    /// `c1` and `c2`.
    pub fn quarter_turn() -> Self {
        Self::rotation(T::FRAC_PI_2(), T::FRAC_PI_2())
    }

    /// `next ∘ self`: apply `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self { s_a: mul2(&next.s_a, &self.s_a), s_b: mul2(&next.s_b, &self.s_b) }
    }

    pub fn inverse(&self) -> Self {
        let inv = |b: &Block<T>| [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]];
        Self { s_a: inv(&self.s_a), s_b: inv(&self.s_b) }
    }

    pub fn as_matrix(&self) -> Matrix4<T> {
        let z = T::zero();
        let (a, b) = (&self.s_a, &self.s_b);
        [[a[0][0], a[0][1], z, z], [a[1][0], a[1][1], z, z], [z, z, b[0][0], b[0][1]], [z, z, b[1][0], b[1][1]]]
    }
}

/// `σ → S σ Sᵀ` for a local Gaussian unitary `t`.
pub fn apply_local<T: Scalar>(sigma: &CovarianceMatrix<T>, t: &LocalSymplectic<T>) -> CovarianceMatrix<T> {
    sigma.apply_local(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tmsv_half() -> CovarianceMatrix<f64> {
        CovarianceMatrix::tmsv(0.5)
    }

    #[test]
    fn vacuum_saturates_uncertainty() {
        let r = validate(CovarianceMatrix::<f64>::vacuum().as_rows()).unwrap();
        assert!(r.physical);
        for nu in r.symplectic_eigenvalues {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn sub_vacuum_diagonal_is_unphysical() {
        let d = [[0.25, 0.0, 0.0, 0.0], [0.0, 0.25, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.0, 0.5]];
        let r = validate(&d).unwrap();
        assert!(!r.physical);
        assert_abs_diff_eq!(r.symplectic_eigenvalues[0], 0.25, epsilon = 1e-15);
        assert!(matches!(CovarianceMatrix::new(d), Err(Error::Unphysical { .. })));
    }

    #[test]
    fn asymmetric_input_names_the_asymmetry() {
        let mut d = *CovarianceMatrix::<f64>::vacuum().as_rows();
        d[0][2] = 0.1;
        match validate(&d) {
            Err(Error::Asymmetric { max_asymmetry }) => assert_abs_diff_eq!(max_asymmetry, 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indefinite_matrix_is_not_physical() {
        let mut d = *CovarianceMatrix::<f64>::vacuum().as_rows();
        d[0][0] = -1.0;
        assert!(!validate(&d).unwrap().physical);
    }

    #[test]
    fn tmsv_is_pure() {
        let s = tmsv_half();
        let (lo, hi) = s.symplectic_eigenvalues();
        assert_abs_diff_eq!(lo, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.get(0, 0), 1f64.cosh() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(0, 2), 1f64.sinh() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(1, 3), -(1f64.sinh()) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezing_vacuum() {
        let s = 3.0;
        let out = CovarianceMatrix::<f64>::vacuum().apply_local(&LocalSymplectic::squeeze(s, 1.0));
        assert_abs_diff_eq!(out.get(0, 0), s / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.get(1, 1), 1.0 / (2.0 * s), epsilon = 1e-15);
        assert_abs_diff_eq!(out.get(2, 2), 0.5);
        assert_abs_diff_eq!(out.get(3, 3), 0.5);
    }

    #[test]
    fn identity_is_exact() {
        let s = CovarianceMatrix::squeezed_thermal(0.3, 0.7, 0.1).beam_splitter(0.4);
        assert_eq!(s.apply_local(&LocalSymplectic::identity()), s);
    }

    #[test]
    fn quarter_turn_swaps_correlations() {
        let s = tmsv_half().apply_local(&LocalSymplectic::quarter_turn());
        // c1 = ⟨x_a x_b⟩ and c2 = ⟨p_a p_b⟩ trade places.
        assert_abs_diff_eq!(s.get(0, 2), tmsv_half().get(1, 3), epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(1, 3), tmsv_half().get(0, 2), epsilon = 1e-15);
        assert_abs_diff_eq!(s.log_negativity(), tmsv_half().log_negativity(), epsilon = 1e-10);
    }

    #[test]
    fn standard_moments_of_tmsv() {
        let m = to_standard_moments(&tmsv_half()).unwrap();
        let expect = [0.7715, 0.7715, 0.7715, 0.7715, 0.5876, -0.5876];
        for (got, want) in m.to_array().iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 5e-5);
        }
        assert_eq!(
            to_standard_moments(&CovarianceMatrix::<f64>::vacuum()).unwrap().to_array(),
            [0.5, 0.5, 0.5, 0.5, 0.0, 0.0]
        );
    }

    #[test]
    fn non_standard_entry_is_reported() {
        let mut d = *CovarianceMatrix::<f64>::thermal(1.0, 1.0).as_rows();
        d[0][1] = 0.1;
        d[1][0] = 0.1;
        let cm = CovarianceMatrix::new(d).unwrap();
        assert_eq!(to_standard_moments(&cm), Err(Error::NonStandardForm { row: 0, col: 1, value: 0.1 }));
    }

    #[test]
    fn moments_reject_local_uncertainty_violation() {
        assert!(StandardMoments::new(0.3, 0.5, 0.5, 0.5, 0.0, 0.0).is_err());
        assert!(StandardMoments::new(0.5, 0.5, 0.5, 0.5, 0.1, 0.0).is_err());
        assert!(StandardMoments::new(-1.0, 0.5, 0.5, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn symplectic_rejects_non_unit_determinant() {
        let b = [[2.0, 0.0], [0.0, 1.0]];
        assert!(LocalSymplectic::new(b, identity2()).is_err());
        assert!(LocalSymplectic::new(rotation2(0.3), [[2.0, 0.0], [0.0, 0.5]]).is_ok());
    }

    #[test]
    fn json_layout() {
        let m = StandardMoments::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        let v: serde_json::Value = serde_json::to_value(m).unwrap();
        assert_eq!(v["m1"], 1.0);
        assert_eq!(v["c2"], 0.0);
        let cm = CovarianceMatrix::<f64>::vacuum();
        let s = serde_json::to_string(&cm).unwrap();
        assert!(s.starts_with("{\"sigma\":[["));
        let back: CovarianceMatrix<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cm);
        let bad = r#"{"sigma":[[0.5,0.2,0,0],[0,0.5,0,0],[0,0,0.5,0],[0,0,0,0.5]]}"#;
        assert!(serde_json::from_str::<CovarianceMatrix<f64>>(bad).is_err());
    }

    #[test]
    fn single_precision_vacuum() {
        let s = CovarianceMatrix::<f32>::tmsv(0.5);
        let (lo, _) = s.symplectic_eigenvalues();
        assert!((lo - 0.5).abs() < 1e-5);
    }
}
