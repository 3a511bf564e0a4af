//! The floating-point scalar abstraction shared by every module.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Element of the field 𝕂. Real-mode spaces keep `im == 0`.
pub type Scalar<T> = Complex<T>;

/// Real floating point type the library is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Default
    + fmt::Debug
    + fmt::Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; out-of-range values saturate per `as` semantics.
    fn lit(value: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn lit(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn lit(value: f64) -> Self {
        value
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

#[inline]
pub(crate) fn is_finite_scalar<T: Real>(z: &Scalar<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Scalar<T> {
    Complex::new(re, T::zero())
}

/// Default tolerances, tuned for `f64`.
///
/// `f32` callers should pass their own values; these are far below `f32::EPSILON`.
pub mod tol {
    /// Absolute slack on Gram entries |⟨e_i, e_j⟩ − δ_ij|.
    pub const GRAM: f64 = 1e-10;
    /// Relative slack for "≥ 0" hypothesis tests.
    pub const CONDITION: f64 = 1e-9;
    /// Relative slack for left ≤ refined ≤ outer.
    pub const CHAIN: f64 = 1e-9;
    /// Relative slack for exact algebraic identities.
    pub const IDENTITY: f64 = 1e-10;
    /// Gram tolerance for families built from quadrature rules.
    pub const FAMILY: f64 = 1e-8;
    /// Absolute slack in pointwise envelope comparisons.
    pub const POINTWISE: f64 = 1e-12;
    /// Relative width of the "tie" band when comparing two bounds.
    pub const TIE: f64 = 1e-9;
    /// Outer bounds at or below this are treated as zero when forming ratios.
    pub const RATIO_GUARD: f64 = 1e-300;
}
