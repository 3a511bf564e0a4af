//! Counterparts of Bessel's inequality and Grüss-type bounds for finite
//! orthonormal families in real and complex inner product spaces.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the precision. Randomized sharpness
//! probing ([`sharpness`]) runs in `f64`.
//!
//! ```
//! use orthobound::{bessel_counterpart_b2, BoundOptions, BoxBoundsF64, OrthonormalFamilyF64, VectorF64};
//!
//! let s = std::f64::consts::FRAC_1_SQRT_2;
//! let family = OrthonormalFamilyF64::new(vec![VectorF64::from_real(&[s, s]).unwrap()], None, 1e-10).unwrap();
//! let x = VectorF64::from_real(&[s, -s]).unwrap();
//! let bounds = BoxBoundsF64::from_real(&[-1.0], &[1.0]).unwrap();
//! let report = bessel_counterpart_b2(&x, &family, &bounds, &BoundOptions::default()).unwrap();
//! assert!((report.left_value - report.outer_bound).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod conditions;
pub mod error;
pub mod quadrature;
pub mod real;
pub mod sharpness;
pub mod space;

pub use bounds::{
    aczel_check, bessel_counterpart_b1, bessel_counterpart_b2, bessel_difference, companion_abs,
    companion_bound, compare_b1_b2, gruess_v1, gruess_v2, identity_scale, lemma21_bound,
    AczelOutcome, BoundOptions, BoundReport, Comparison, Theorem, Tighter,
};
pub use conditions::{
    check_mixture, check_norm_form, check_pair, check_re_form, mixture, BallSampler, BoxBounds,
    ConditionForm, ConditionReport, MixWeight, Sign,
};
pub use error::{Error, Result};
pub use quadrature::{
    build_family, embed, integral_bessel, integral_gruess, pointwise_box_check, weighted_inner,
    FamilyKind, FunctionFamily, FunctionSample, PointwiseCheck, QuadratureSpace, Rule,
};
pub use real::{tol, Real, Scalar};
pub use sharpness::{equality_witness, probe, ProbeConfig, ProbeInstance, SharpnessResult};
pub use space::{
    fourier_coefficients, gram_schmidt, inner, norm, GramSchmidt, Mode, OrthonormalFamily, Vector,
};

pub type ScalarF64 = Scalar<f64>;
pub type VectorF64 = Vector<f64>;
pub type OrthonormalFamilyF64 = OrthonormalFamily<f64>;
pub type BoxBoundsF64 = BoxBounds<f64>;
pub type ConditionReportF64 = ConditionReport<f64>;
pub type BoundReportF64 = BoundReport<f64>;
pub type QuadratureSpaceF64 = QuadratureSpace<f64>;
pub type FunctionSampleF64 = FunctionSample<f64>;

pub type ScalarF32 = Scalar<f32>;
pub type VectorF32 = Vector<f32>;
pub type OrthonormalFamilyF32 = OrthonormalFamily<f32>;
pub type BoxBoundsF32 = BoxBounds<f32>;
pub type BoundReportF32 = BoundReport<f32>;
pub type QuadratureSpaceF32 = QuadratureSpace<f32>;
