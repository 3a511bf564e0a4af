//! Hypothesis checks shared by every bound.
//!
//! Each theorem constrains a vector `x` relative to a family by per-index
//! scalar pairs `(φ_i, Φ_i)`. The condition comes in two forms:
//!
//! * bilinear form: `Re⟨Σ Φ_i e_i − x, x − Σ φ_i e_i⟩ ≥ 0`
//! * ball form: `‖x − Σ (φ_i+Φ_i)/2 e_i‖ ≤ ½ (Σ |Φ_i − φ_i|²)^½`
//!
//! For an orthonormal family the bilinear value equals `rhs² − lhs²`
//! exactly, which every [`ConditionReport`] records as `identity_residual`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{is_finite_scalar, real, Real, Scalar};
use crate::space::{inner_unchecked, Mode, OrthonormalFamily, Vector};

/// Per-index lower/upper scalars (φ_i, Φ_i), one pair per family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox<T>", bound = "T: Real")]
pub struct BoxBounds<T> {
    lower: Vec<Scalar<T>>,
    upper: Vec<Scalar<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real")]
struct RawBox<T> {
    lower: Vec<Scalar<T>>,
    upper: Vec<Scalar<T>>,
}

impl<T: Real> TryFrom<RawBox<T>> for BoxBounds<T> {
    type Error = Error;

    fn try_from(raw: RawBox<T>) -> Result<Self> {
        BoxBounds::new(raw.lower, raw.upper)
    }
}

impl<T: Real> BoxBounds<T> {
    /// Degenerate boxes (all φ_i = Φ_i) are accepted here; condition checks
    /// then only admit the midpoint vector itself.
    pub fn new(lower: Vec<Scalar<T>>, upper: Vec<Scalar<T>>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Shape {
                what: "box bounds",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Shape {
                what: "box bounds",
                expected: 1,
                actual: 0,
            });
        }
        if !lower.iter().chain(&upper).all(is_finite_scalar) {
            return Err(Error::NonFinite { what: "box bound" });
        }
        Ok(Self { lower, upper })
    }

    pub fn from_real(lower: &[T], upper: &[T]) -> Result<Self> {
        Self::new(
            lower.iter().map(|&v| real(v)).collect(),
            upper.iter().map(|&v| real(v)).collect(),
        )
    }

    /// The same pair `(lo, hi)` for each of `n` indices.
    pub fn uniform(n: usize, lo: Scalar<T>, hi: Scalar<T>) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[Scalar<T>] {
        &self.lower
    }

    pub fn upper(&self) -> &[Scalar<T>] {
        &self.upper
    }

    pub fn midpoints(&self) -> Vec<Scalar<T>> {
        let half = T::lit(0.5);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l + u) * half)
            .collect()
    }

    /// Σ |Φ_i − φ_i|².
    pub fn spread_sqr(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (u - l).norm_sqr())
            .sum()
    }

    /// ½ (Σ |Φ_i − φ_i|²)^½, the radius of the ball form.
    pub fn radius(&self) -> T {
        T::lit(0.5) * self.spread_sqr().sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.spread_sqr() == T::zero()
    }

    /// Multiplies every bound by `t`.
    pub fn scaled(&self, t: T) -> Self {
        Self {
            lower: self.lower.iter().map(|&z| z * t).collect(),
            upper: self.upper.iter().map(|&z| z * t).collect(),
        }
    }

    pub(crate) fn check_against(
        &self,
        family: &OrthonormalFamily<T>,
        what: &'static str,
    ) -> Result<()> {
        family.check_coefficients(&self.lower, what)?;
        family.check_coefficients(&self.upper, what)
    }
}

/// Which form decided the `satisfied` flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionForm {
    ReForm,
    NormForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport<T> {
    /// Re⟨Σ Φ_i e_i − x, x − Σ φ_i e_i⟩.
    pub re_form_value: T,
    /// ‖x − Σ (Φ_i+φ_i)/2 e_i‖.
    pub norm_form_lhs: T,
    /// ½ (Σ |Φ_i − φ_i|²)^½.
    pub norm_form_rhs: T,
    pub satisfied: bool,
    pub tolerance_used: T,
    /// max(1, norm_form_rhs²).
    pub scale: T,
    pub form: ConditionForm,
    /// |re_form_value| ≤ tolerance·scale: the two forms may disagree here.
    pub ambiguous: bool,
    /// |re_form_value + lhs² − rhs²|.
    pub identity_residual: T,
}

impl<T: Real> ConditionReport<T> {
    /// How far the hypothesis is from holding (0 when satisfied).
    pub fn excess(&self) -> T {
        match self.form {
            ConditionForm::ReForm => (-self.re_form_value).max(T::zero()),
            ConditionForm::NormForm => (self.norm_form_lhs - self.norm_form_rhs).max(T::zero()),
        }
    }
}

fn evaluate<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    tolerance: T,
    form: ConditionForm,
) -> Result<ConditionReport<T>> {
    family.check_vector(x, "condition vector")?;
    bounds.check_against(family, "condition box")?;
    if tolerance.is_nan() || tolerance < T::zero() {
        return Err(Error::Domain("tolerance must be nonnegative".into()));
    }
    Ok(evaluate_unchecked(x, family, bounds, tolerance, form))
}

pub(crate) fn evaluate_unchecked<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    tolerance: T,
    form: ConditionForm,
) -> ConditionReport<T> {
    let upper = family.combination_unchecked(bounds.upper());
    let lower = family.combination_unchecked(bounds.lower());
    let mid = family.combination_unchecked(&bounds.midpoints());
    let re_form_value = inner_unchecked(&upper.sub_unchecked(x), &x.sub_unchecked(&lower)).re;
    let norm_form_lhs = x.sub_unchecked(&mid).norm();
    let norm_form_rhs = bounds.radius();
    let rhs2 = norm_form_rhs * norm_form_rhs;
    let scale = rhs2.max(T::one());
    let slack = tolerance * scale;
    let satisfied = match form {
        ConditionForm::ReForm => re_form_value >= -slack,
        ConditionForm::NormForm => rhs2 - norm_form_lhs * norm_form_lhs >= -slack,
    };
    ConditionReport {
        re_form_value,
        norm_form_lhs,
        norm_form_rhs,
        satisfied,
        tolerance_used: tolerance,
        scale,
        form,
        ambiguous: re_form_value.abs() <= slack,
        identity_residual: (re_form_value + norm_form_lhs * norm_form_lhs - rhs2).abs(),
    }
}

/// Tests `Re⟨Σ Φ_i e_i − x, x − Σ φ_i e_i⟩ ≥ −tolerance·scale`.
pub fn check_re_form<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    tolerance: T,
) -> Result<ConditionReport<T>> {
    evaluate(x, family, bounds, tolerance, ConditionForm::ReForm)
}

/// Tests `‖x − Σ (φ_i+Φ_i)/2 e_i‖² ≤ ¼ Σ |Φ_i − φ_i|² + tolerance·scale`.
pub fn check_norm_form<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    tolerance: T,
) -> Result<ConditionReport<T>> {
    evaluate(x, family, bounds, tolerance, ConditionForm::NormForm)
}

pub fn check_pair<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    box_x: &BoxBounds<T>,
    box_y: &BoxBounds<T>,
    tolerance: T,
) -> Result<(ConditionReport<T>, ConditionReport<T>)> {
    Ok((
        check_re_form(x, family, box_x, tolerance)?,
        check_re_form(y, family, box_y, tolerance)?,
    ))
}

/// λ ∈ (0, 1).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64", bound = "T: Real")]
pub struct MixWeight<T>(T);

impl<T: Real> MixWeight<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if lambda > T::zero() && lambda < T::one() {
            Ok(Self(lambda))
        } else {
            Err(Error::Domain(format!(
                "lambda = {lambda} must lie in (0, 1)"
            )))
        }
    }

    pub fn half() -> Self {
        Self(T::lit(0.5))
    }

    pub fn get(self) -> T {
        self.0
    }

    pub fn complement(self) -> T {
        T::one() - self.0
    }
}

impl<T: Real> TryFrom<f64> for MixWeight<T> {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(T::lit(v))
    }
}

impl<T: Real> From<MixWeight<T>> for f64 {
    fn from(w: MixWeight<T>) -> f64 {
        w.0.to_f64_lossy()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// λx ± (1−λ)y.
pub fn mixture<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    lambda: MixWeight<T>,
    sign: Sign,
) -> Result<Vector<T>> {
    x.affine(lambda.get(), y, sign.value::<T>() * lambda.complement())
}

/// Condition check for the mixed vector λx ± (1−λ)y.
pub fn check_mixture<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    lambda: T,
    sign: Sign,
    tolerance: T,
) -> Result<ConditionReport<T>> {
    let lambda = MixWeight::new(lambda)?;
    let z = mixture(x, y, lambda, sign)?;
    check_re_form(&z, family, bounds, tolerance)
}

/// Draws points in the ball `‖x − Σ (φ_i+Φ_i)/2 e_i‖ ≤ r`.
///
/// Interior points are uniform in the ball of the full real dimension
/// (`n` for real mode, `2n` for complex); a `boundary_fraction` of draws
/// land exactly on the sphere.
#[derive(Clone, Debug)]
pub struct BallSampler<T> {
    center: Vector<T>,
    radius: T,
    boundary_fraction: f64,
}

impl<T: Real> BallSampler<T> {
    pub fn new(
        family: &OrthonormalFamily<T>,
        bounds: &BoxBounds<T>,
        boundary_fraction: f64,
    ) -> Result<Self> {
        bounds.check_against(family, "sampler box")?;
        if !(0.0..=1.0).contains(&boundary_fraction) {
            return Err(Error::Domain("boundary fraction must lie in [0, 1]".into()));
        }
        Ok(Self {
            center: family.combination_unchecked(&bounds.midpoints()),
            radius: bounds.radius(),
            boundary_fraction,
        })
    }

    pub fn center(&self) -> &Vector<T> {
        &self.center
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector<T> {
        let on_boundary = rng.random::<f64>() < self.boundary_fraction;
        self.sample_at(rng, on_boundary)
    }

    /// One draw, forced onto the sphere when `on_boundary`.
    pub fn sample_at<R: Rng + ?Sized>(&self, rng: &mut R, on_boundary: bool) -> Vector<T> {
        let n = self.center.dim();
        let mode = self.center.mode();
        let real_dim = if mode == Mode::Real { n } else { 2 * n };
        let mut dir: Vec<f64> = (0..real_dim).map(|_| StandardNormal.sample(rng)).collect();
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            dir[0] = 1.0;
        } else {
            dir.iter_mut().for_each(|v| *v /= len);
        }
        let u = if on_boundary {
            1.0
        } else {
            rng.random::<f64>().powf(1.0 / real_dim as f64)
        };
        let r = self.radius * T::lit(u);
        let coords = self
            .center
            .coords()
            .iter()
            .enumerate()
            .map(|(k, &c)| match mode {
                Mode::Real => c + real(r * T::lit(dir[k])),
                Mode::Complex => {
                    c + Scalar::new(r * T::lit(dir[2 * k]), r * T::lit(dir[2 * k + 1]))
                }
            })
            .collect();
        Vector::new(coords, mode).expect("sampled coordinates are finite")
    }
}
