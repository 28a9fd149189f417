#![allow(dead_code)]

use gauss_nclass::gaussian::CovarianceMatrix;
use gauss_nclass::LocalSymplectic;
use nalgebra::{Matrix4, SymmetricEigen};

pub fn to_na(m: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

pub fn omega() -> Matrix4<f64> {
    let mut o = Matrix4::zeros();
    o[(0, 1)] = 1.0;
    o[(1, 0)] = -1.0;
    o[(2, 3)] = 1.0;
    o[(3, 2)] = -1.0;
    o
}

/// Moduli of the eigenvalues of `iΩσ`, ascending, one per pair.
pub fn symplectic_oracle(sigma: &Matrix4<f64>) -> (f64, f64) {
    let mut ev: Vec<f64> = (omega() * sigma).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ((ev[0] + ev[1]) / 2.0, (ev[2] + ev[3]) / 2.0)
}

pub fn pt_oracle(sigma: &Matrix4<f64>) -> (f64, f64) {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    symplectic_oracle(&(p * sigma * p))
}

pub fn ln_oracle(sigma: &Matrix4<f64>) -> f64 {
    (-(2.0 * pt_oracle(sigma).0).log2()).max(0.0)
}

/// Gaussian P is regular and nonnegative once `σ + tI − I/2 ⪰ 0`.
pub fn depth_oracle(sigma: &Matrix4<f64>) -> f64 {
    let low = SymmetricEigen::new(*sigma).eigenvalues.min();
    (0.5 - low).max(0.0)
}

/// Squeezed thermal state, beam splitter, phase rotations, local squeezing.
pub fn general_state(
    r: f64,
    na: f64,
    nb: f64,
    theta: f64,
    phases: [f64; 4],
    la: f64,
    lb: f64,
) -> CovarianceMatrix<f64> {
    CovarianceMatrix::squeezed_thermal(r, na, nb)
        .beam_splitter(theta)
        .apply_local(&LocalSymplectic::rotation(phases[0], phases[1]))
        .apply_local(&LocalSymplectic::squeeze(la.exp(), lb.exp()))
        .apply_local(&LocalSymplectic::rotation(phases[2], phases[3]))
}
