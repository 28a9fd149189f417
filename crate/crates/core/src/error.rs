use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric: max |σ_ij − σ_ji| = {max_asymmetry:e}")]
    Asymmetric { max_asymmetry: f64 },

    #[error("covariance matrix is unphysical: smallest symplectic eigenvalue {min_symplectic:.12} < 1/2")]
    Unphysical { min_symplectic: f64 },

    #[error("non-finite entry in covariance matrix at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("local transform is not symplectic: det(s_a) = {det_a}, det(s_b) = {det_b}")]
    NotSymplectic { det_a: f64, det_b: f64 },

    #[error("matrix is not in standard form: entry ({row}, {col}) = {value:e}")]
    NonStandardForm { row: usize, col: usize, value: f64 },

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: m1+m2 = {local_a}, n1+n2 = {local_b} (both must exceed 1)")]
    DegenerateState { local_a: f64, local_b: f64 },

    #[error("numerical degeneracy: e = {e:e} must be positive")]
    NumericalDegeneracy { e: f64 },

    #[error("locally nonclassical input: local variance {value} < 1/2 in mode {mode}")]
    LocallyNonclassical { mode: char, value: f64 },

    #[error("squeezing solver did not converge: residuals ({residual_11:e}, {residual_14:e})")]
    NoConvergence { residual_11: f64, residual_14: f64 },

    #[error("squeezing roots disagree on the P-positivity verdict: {roots:?}")]
    AmbiguousRoots { roots: Vec<(f64, f64)> },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too few records: {found} converged, {required} required")]
    TooFewRecords { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
