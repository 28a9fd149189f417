//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type the phase-space routines are generic over: `f32` or `f64`.
///
/// Tolerances live here because the absolute thresholds that make sense in
/// double precision are meaningless in single precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Largest tolerated `|σ_ij − σ_ji|` at construction.
    fn symmetry_tol() -> Self;
    /// Slack on the uncertainty relation `ν ≥ 1/2`.
    fn physical_tol() -> Self;
    /// Magnitude below which a non-standard covariance entry counts as zero.
    fn standard_form_tol() -> Self;
    /// Slack on the boundary of the positive-P conditions.
    fn boundary_tol() -> Self;
    /// Residual threshold for the local-squeezing conditions.
    fn residual_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn symmetry_tol() -> Self {
        1e-12
    }
    fn physical_tol() -> Self {
        1e-10
    }
    fn standard_form_tol() -> Self {
        1e-9
    }
    fn boundary_tol() -> Self {
        1e-12
    }
    fn residual_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn symmetry_tol() -> Self {
        1e-5
    }
    fn physical_tol() -> Self {
        1e-4
    }
    fn standard_form_tol() -> Self {
        1e-4
    }
    fn boundary_tol() -> Self {
        1e-5
    }
    fn residual_tol() -> Self {
        1e-4
    }
}
