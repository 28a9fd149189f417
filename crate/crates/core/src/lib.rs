//! Phase-space tools for deciding when nonclassicality of a two-mode
//! continuous-variable state certifies entanglement.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom of this file fix it to `f64`, which is what the
//! studies and the command-line tool use.

pub mod canonical;
pub mod error;
pub mod gaussian;
pub mod measures;
pub mod pfunc;
pub mod sampler;
pub mod scalar;
pub mod study;

pub use canonical::{canonicalize, reduce_to_standard_form, solve_squeezings, CanonicalResult, SolverMethod};
pub use error::{Error, Result};
pub use gaussian::{apply_local, to_standard_moments, validate, ValidationReport};
pub use measures::{
    duan_lhs, gaussian_p_positive, log_negativity, measure_all, nonclassicality_depth, optimal_zeta, simon_separable,
    DuanResult, LogNegativity, MeasureReport,
};
pub use pfunc::{
    depth_of_mixture, p_full, p_marginal_a, p_marginal_b, scan_cut, scan_marginal, smoothed_p, FieldSlice, GridSpec,
    Mode, SliceSummary,
};
pub use sampler::{sample_state, SamplerConfig};
pub use scalar::Scalar;
pub use study::{
    perturbation_identity, relation_analysis, run_study, PerturbationOutcome, PerturbationSpec, RelationReport,
    StudyRecord,
};

pub type CovarianceMatrix = gaussian::CovarianceMatrix<f64>;
pub type StandardMoments = gaussian::StandardMoments<f64>;
pub type LocalSymplectic = gaussian::LocalSymplectic<f64>;
pub type Canonical = canonical::CanonicalResult<f64>;
pub type Measures = measures::MeasureReport<f64>;
pub type MixtureParams = pfunc::MixtureParams<f64>;

pub type CovarianceMatrixF32 = gaussian::CovarianceMatrix<f32>;
pub type StandardMomentsF32 = gaussian::StandardMoments<f32>;
