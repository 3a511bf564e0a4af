//! Bessel-counterpart, Grüss-type and λ-companion bounds.
//!
//! Every evaluator returns a [`BoundReport`] holding the three terms of its
//! inequality chain, `left ≤ refined ≤ outer`, together with the hypothesis
//! diagnostics it was evaluated under. In strict mode (the default) a failed
//! hypothesis is an [`Error::Hypothesis`]; with `force` the report is still
//! produced and `hypotheses_satisfied` is false.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conditions::{
    evaluate_unchecked, mixture, BoxBounds, ConditionForm, ConditionReport, MixWeight, Sign,
};
use crate::error::{Error, Result};
use crate::real::{tol, Real, Scalar};
use crate::space::{inner_unchecked, OrthonormalFamily, Vector};

/// Identifies which inequality chain a report evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// ‖x‖² − Σ|⟨x,e_i⟩|² ≤ r² − Σ|λ_i − ⟨x,e_i⟩|² under ‖x − Σλ_i e_i‖ ≤ r.
    Lemma21,
    /// Bessel counterpart with the bilinear-form refinement.
    BesselB1,
    /// Bessel counterpart with the coefficient-distance refinement.
    BesselB2,
    /// Both Bessel counterparts side by side.
    Compare,
    /// Grüss refinement through the square roots of the bilinear forms.
    GruessV1,
    /// Grüss refinement through the coefficient-distance products.
    GruessV2,
    /// One-sided λ-mixture bound on Re[⟨x,y⟩ − Σ⟨x,e_i⟩⟨e_i,y⟩].
    Companion,
    /// Two-sided λ-mixture bound.
    CompanionAbs,
    /// `BesselB2` in a quadrature-realized weighted L² space.
    IntegralBessel,
    /// `GruessV2` in a quadrature-realized weighted L² space.
    IntegralGruess,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::Lemma21,
        Theorem::BesselB1,
        Theorem::BesselB2,
        Theorem::Compare,
        Theorem::GruessV1,
        Theorem::GruessV2,
        Theorem::Companion,
        Theorem::CompanionAbs,
        Theorem::IntegralBessel,
        Theorem::IntegralGruess,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::Lemma21 => "lemma21",
            Theorem::BesselB1 => "bessel_b1",
            Theorem::BesselB2 => "bessel_b2",
            Theorem::Compare => "compare",
            Theorem::GruessV1 => "gruess_v1",
            Theorem::GruessV2 => "gruess_v2",
            Theorem::Companion => "companion",
            Theorem::CompanionAbs => "companion_abs",
            Theorem::IntegralBessel => "integral_bessel",
            Theorem::IntegralGruess => "integral_gruess",
        }
    }

    /// Chains whose left end is a Bessel difference and so must be ≥ 0.
    pub fn is_bessel_type(self) -> bool {
        matches!(
            self,
            Theorem::Lemma21
                | Theorem::BesselB1
                | Theorem::BesselB2
                | Theorem::Compare
                | Theorem::IntegralBessel
        )
    }

    pub fn needs_y(self) -> bool {
        matches!(
            self,
            Theorem::GruessV1
                | Theorem::GruessV2
                | Theorem::Companion
                | Theorem::CompanionAbs
                | Theorem::IntegralGruess
        )
    }

    /// Grüss-type chains carry a separate box for `y`.
    pub fn needs_box_y(self) -> bool {
        matches!(
            self,
            Theorem::GruessV1 | Theorem::GruessV2 | Theorem::IntegralGruess
        )
    }

    pub fn needs_lambda(self) -> bool {
        matches!(self, Theorem::Companion | Theorem::CompanionAbs)
    }

    pub fn is_integral(self) -> bool {
        matches!(self, Theorem::IntegralBessel | Theorem::IntegralGruess)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnsupportedTag(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundOptions<T> {
    /// Slack for the hypothesis "≥ 0" tests.
    pub condition_tolerance: T,
    /// Relative slack for the chain ordering.
    pub chain_tolerance: T,
    /// Evaluate even when a hypothesis fails.
    pub force: bool,
}

impl<T: Real> Default for BoundOptions<T> {
    fn default() -> Self {
        Self {
            condition_tolerance: T::lit(tol::CONDITION),
            chain_tolerance: T::lit(tol::CHAIN),
            force: false,
        }
    }
}

impl<T: Real> BoundOptions<T> {
    pub fn forced() -> Self {
        Self {
            force: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundReport<T> {
    pub theorem: Theorem,
    pub left_value: T,
    pub refined_bound: T,
    pub outer_bound: T,
    pub chain_ok: bool,
    pub hypotheses_satisfied: bool,
    pub forced: bool,
    /// max(1, outer_bound); chain slack is `chain_tolerance · scale`.
    pub scale: T,
    pub conditions: Vec<ConditionReport<T>>,
    /// Residual of ‖x−Σλ_ie_i‖² − Σ|λ_i−⟨x,e_i⟩|² = ‖x‖² − Σ|⟨x,e_i⟩|² (lemma21 only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub identity_residual: Option<T>,
}

impl<T: Real> BoundReport<T> {
    /// left / outer, or `None` when the outer bound is numerically zero.
    pub fn ratio(&self) -> Option<T> {
        (self.outer_bound > T::lit(tol::RATIO_GUARD)).then(|| self.left_value / self.outer_bound)
    }

    fn assemble(
        theorem: Theorem,
        left_value: T,
        refined_bound: T,
        outer_bound: T,
        conditions: Vec<ConditionReport<T>>,
        opts: &BoundOptions<T>,
    ) -> Self {
        let scale = outer_bound.abs().max(T::one());
        let slack = opts.chain_tolerance * scale;
        let mut chain_ok =
            left_value <= refined_bound + slack && refined_bound <= outer_bound + slack;
        if theorem.is_bessel_type() {
            chain_ok &= left_value >= -T::lit(tol::IDENTITY) * scale;
        }
        let hypotheses_satisfied = conditions.iter().all(|c| c.satisfied);
        Self {
            theorem,
            left_value,
            refined_bound,
            outer_bound,
            chain_ok,
            hypotheses_satisfied,
            forced: opts.force,
            scale,
            conditions,
            identity_residual: None,
        }
    }

    pub(crate) fn retagged(mut self, theorem: Theorem) -> Self {
        self.theorem = theorem;
        self
    }
}

fn require<T: Real>(
    report: &ConditionReport<T>,
    which: &str,
    opts: &BoundOptions<T>,
) -> Result<()> {
    if report.satisfied || opts.force {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            which: which.to_string(),
            excess: report.excess().to_f64_lossy(),
        })
    }
}

fn condition<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    which: &str,
    opts: &BoundOptions<T>,
) -> Result<ConditionReport<T>> {
    family.check_vector(x, "bound vector")?;
    bounds.check_against(family, "bound box")?;
    let rep = evaluate_unchecked(
        x,
        family,
        bounds,
        opts.condition_tolerance,
        ConditionForm::ReForm,
    );
    require(&rep, which, opts)?;
    Ok(rep)
}

fn bessel_difference_unchecked<T: Real>(x: &Vector<T>, coeffs: &[Scalar<T>]) -> T {
    x.norm_sqr() - coeffs.iter().map(|c| c.norm_sqr()).sum::<T>()
}

/// Σ |a_i − b_i|².
fn distance_sqr<T: Real>(a: &[Scalar<T>], b: &[Scalar<T>]) -> T {
    a.iter().zip(b).map(|(&u, &v)| (u - v).norm_sqr()).sum()
}

/// ⟨x,y⟩ − Σ ⟨x,e_i⟩⟨e_i,y⟩.
fn gruess_residual<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    cx: &[Scalar<T>],
    cy: &[Scalar<T>],
) -> Scalar<T> {
    cx.iter()
        .zip(cy)
        .fold(inner_unchecked(x, y), |acc, (&a, &b)| acc - a * b.conj())
}

/// The Bessel difference ‖x‖² − Σ |⟨x, e_i⟩|².
pub fn bessel_difference<T: Real>(x: &Vector<T>, family: &OrthonormalFamily<T>) -> Result<T> {
    family.check_vector(x, "bessel difference")?;
    Ok(bessel_difference_unchecked(
        x,
        &family.coefficients_unchecked(x),
    ))
}

/// 0 ≤ ‖x‖² − Σ|⟨x,e_i⟩|² ≤ r² − Σ|λ_i − ⟨x,e_i⟩|², given ‖x − Σλ_i e_i‖ ≤ r.
///
/// `outer_bound` is r². The report carries the residual of the underlying
/// identity, which holds for every input.
pub fn lemma21_bound<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    lambdas: &[Scalar<T>],
    r: T,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    family.check_vector(x, "lemma21 vector")?;
    family.check_coefficients(lambdas, "lemma21 centers")?;
    if !(r.is_finite() && r > T::zero()) {
        return Err(Error::Domain(format!("radius r = {r} must be positive")));
    }
    let center = family.combination_unchecked(lambdas);
    let dist_sqr = x.sub_unchecked(&center).norm_sqr();
    let r2 = r * r;
    let excess = dist_sqr - r2;
    if excess > opts.condition_tolerance * r2.max(T::one()) && !opts.force {
        return Err(Error::Hypothesis {
            which: "|x - sum lambda_i e_i| <= r".into(),
            excess: excess.to_f64_lossy(),
        });
    }
    let coeffs = family.coefficients_unchecked(x);
    let left = bessel_difference_unchecked(x, &coeffs);
    let offset = distance_sqr(lambdas, &coeffs);
    let refined = r2 - offset;
    let mut report = BoundReport::assemble(Theorem::Lemma21, left, refined, r2, Vec::new(), opts);
    report.hypotheses_satisfied = excess <= opts.condition_tolerance * r2.max(T::one());
    report.identity_residual = Some(((dist_sqr - offset) - left).abs());
    Ok(report)
}

/// Scale against which the lemma identity residual is judged: max(1, ‖x‖² + Σ|λ_i|²).
pub fn identity_scale<T: Real>(x: &Vector<T>, lambdas: &[Scalar<T>]) -> T {
    (x.norm_sqr() + lambdas.iter().map(|l| l.norm_sqr()).sum::<T>()).max(T::one())
}

/// ‖x‖² − Σ|⟨x,e_i⟩|² ≤ ¼Σ|Φ_i−φ_i|² − Re⟨ΣΦ_ie_i − x, x − Σφ_ie_i⟩ ≤ ¼Σ|Φ_i−φ_i|².
pub fn bessel_counterpart_b1<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    let cond = condition(x, family, bounds, "x", opts)?;
    let coeffs = family.coefficients_unchecked(x);
    let outer = T::lit(0.25) * bounds.spread_sqr();
    let refined = outer - cond.re_form_value;
    let left = bessel_difference_unchecked(x, &coeffs);
    Ok(BoundReport::assemble(
        Theorem::BesselB1,
        left,
        refined,
        outer,
        vec![cond],
        opts,
    ))
}

/// ‖x‖² − Σ|⟨x,e_i⟩|² ≤ ¼Σ|Φ_i−φ_i|² − Σ|(φ_i+Φ_i)/2 − ⟨x,e_i⟩|² ≤ ¼Σ|Φ_i−φ_i|².
pub fn bessel_counterpart_b2<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    let cond = condition(x, family, bounds, "x", opts)?;
    let coeffs = family.coefficients_unchecked(x);
    let outer = T::lit(0.25) * bounds.spread_sqr();
    let refined = outer - distance_sqr(&bounds.midpoints(), &coeffs);
    let left = bessel_difference_unchecked(x, &coeffs);
    Ok(BoundReport::assemble(
        Theorem::BesselB2,
        left,
        refined,
        outer,
        vec![cond],
        opts,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tighter {
    B1,
    B2,
    Tie,
}

/// The two Bessel counterparts evaluated on the same input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Comparison<T> {
    pub b1: T,
    pub b2: T,
    pub tighter: Tighter,
    pub report: BoundReport<T>,
}

/// Evaluates B1 and B2 and reports the smaller. Neither dominates in general.
///
/// `report.refined_bound` is min(B1, B2); the tie band is `1e-9 · max(1, outer)`.
pub fn compare_b1_b2<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<Comparison<T>> {
    let r1 = bessel_counterpart_b1(x, family, bounds, opts)?;
    let r2 = bessel_counterpart_b2(x, family, bounds, opts)?;
    let (b1, b2) = (r1.refined_bound, r2.refined_bound);
    let tie = T::lit(tol::TIE) * r1.scale;
    let tighter = if (b1 - b2).abs() <= tie {
        Tighter::Tie
    } else if b1 < b2 {
        Tighter::B1
    } else {
        Tighter::B2
    };
    let mut report = BoundReport::assemble(
        Theorem::Compare,
        r1.left_value,
        b1.min(b2),
        r1.outer_bound,
        r1.conditions,
        opts,
    );
    report.chain_ok &= r1.chain_ok && r2.chain_ok;
    Ok(Comparison {
        b1,
        b2,
        tighter,
        report,
    })
}

/// |⟨x,y⟩ − Σ⟨x,e_i⟩⟨e_i,y⟩| ≤ ¼ S_x^½ S_y^½ − (R_x)^½ (R_y)^½ ≤ ¼ S_x^½ S_y^½
/// where S = Σ|upper−lower|² and R is the bilinear form value.
///
/// Bilinear values slightly below zero (inside the tolerance band, or any
/// value under `force`) are clamped to 0 before the square root.
pub fn gruess_v1<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    box_x: &BoxBounds<T>,
    box_y: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    let cx_rep = condition(x, family, box_x, "x", opts)?;
    let cy_rep = condition(y, family, box_y, "y", opts)?;
    let cx = family.coefficients_unchecked(x);
    let cy = family.coefficients_unchecked(y);
    let left = gruess_residual(x, y, &cx, &cy).norm();
    let outer = T::lit(0.25) * box_x.spread_sqr().sqrt() * box_y.spread_sqr().sqrt();
    let rx = cx_rep.re_form_value.max(T::zero()).sqrt();
    let ry = cy_rep.re_form_value.max(T::zero()).sqrt();
    let refined = outer - rx * ry;
    Ok(BoundReport::assemble(
        Theorem::GruessV1,
        left,
        refined,
        outer,
        vec![cx_rep, cy_rep],
        opts,
    ))
}

/// |⟨x,y⟩ − Σ⟨x,e_i⟩⟨e_i,y⟩| ≤ ¼ S_x^½ S_y^½ − Σ|m^x_i − ⟨x,e_i⟩||m^y_i − ⟨y,e_i⟩| ≤ ¼ S_x^½ S_y^½
/// with m the box midpoints.
pub fn gruess_v2<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    box_x: &BoxBounds<T>,
    box_y: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    let cx_rep = condition(x, family, box_x, "x", opts)?;
    let cy_rep = condition(y, family, box_y, "y", opts)?;
    let cx = family.coefficients_unchecked(x);
    let cy = family.coefficients_unchecked(y);
    let left = gruess_residual(x, y, &cx, &cy).norm();
    let outer = T::lit(0.25) * box_x.spread_sqr().sqrt() * box_y.spread_sqr().sqrt();
    let products: T = box_x
        .midpoints()
        .iter()
        .zip(box_y.midpoints())
        .zip(cx.iter().zip(&cy))
        .map(|((&mx, my), (&a, &b))| (mx - a).norm() * (my - b).norm())
        .sum();
    let refined = outer - products;
    Ok(BoundReport::assemble(
        Theorem::GruessV2,
        left,
        refined,
        outer,
        vec![cx_rep, cy_rep],
        opts,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AczelOutcome<T> {
    /// (a² − Σa_i²)(b² − Σb_i²).
    pub lhs: T,
    /// (ab − Σa_ib_i)².
    pub rhs: T,
    pub holds: bool,
}

/// Aczél's inequality (a² − Σa_i²)(b² − Σb_i²) ≤ (ab − Σa_ib_i)² for positive
/// reals with a² ≥ Σa_i² and b² ≥ Σb_i². `holds` uses slack `tolerance · max(1, rhs)`.
pub fn aczel_check<T: Real>(
    a: T,
    b: T,
    a_terms: &[T],
    b_terms: &[T],
    tolerance: T,
) -> Result<AczelOutcome<T>> {
    if a_terms.len() != b_terms.len() {
        return Err(Error::Shape {
            what: "aczel sequences",
            expected: a_terms.len(),
            actual: b_terms.len(),
        });
    }
    let positive = |v: &T| *v > T::zero() && v.is_finite();
    if !positive(&a) || !positive(&b) || !a_terms.iter().chain(b_terms).all(positive) {
        return Err(Error::Domain(
            "aczel entries must be positive and finite".into(),
        ));
    }
    let sa = a * a - a_terms.iter().map(|&v| v * v).sum::<T>();
    let sb = b * b - b_terms.iter().map(|&v| v * v).sum::<T>();
    if sa < T::zero() || sb < T::zero() {
        return Err(Error::Domain(
            "aczel requires a^2 >= sum a_i^2 and b^2 >= sum b_i^2".into(),
        ));
    }
    let cross = a * b - a_terms.iter().zip(b_terms).map(|(&u, &v)| u * v).sum::<T>();
    let lhs = sa * sb;
    let rhs = cross * cross;
    Ok(AczelOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + tolerance * rhs.max(T::one()),
    })
}

/// Re[⟨x,y⟩ − Σ⟨x,e_i⟩⟨e_i,y⟩] ≤ S/(16λ(1−λ)) − Σ|m_i − ⟨z,e_i⟩|²/(4λ(1−λ)) ≤ S/(16λ(1−λ))
/// for z = λx + (1−λ)y inside the ball. The left value is signed.
pub fn companion_bound<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    lambda: MixWeight<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    family.check_vector(y, "companion y")?;
    let z = mixture(x, y, lambda, Sign::Plus)?;
    let cond = condition(&z, family, bounds, "lambda*x + (1-lambda)*y", opts)?;
    let cx = family.coefficients_unchecked(x);
    let cy = family.coefficients_unchecked(y);
    let cz = family.coefficients_unchecked(&z);
    let left = gruess_residual(x, y, &cx, &cy).re;
    let k = (lambda.get() * lambda.complement()).recip();
    let outer = bounds.spread_sqr() * k / T::lit(16.0);
    let refined = outer - k * T::lit(0.25) * distance_sqr(&bounds.midpoints(), &cz);
    Ok(BoundReport::assemble(
        Theorem::Companion,
        left,
        refined,
        outer,
        vec![cond],
        opts,
    ))
}

/// |Re[⟨x,y⟩ − Σ⟨x,e_i⟩⟨e_i,y⟩]| ≤ S/(16λ(1−λ)) when both λx ± (1−λ)y lie in the ball.
/// There is no middle term: `refined_bound == outer_bound`.
pub fn companion_abs<T: Real>(
    x: &Vector<T>,
    y: &Vector<T>,
    family: &OrthonormalFamily<T>,
    bounds: &BoxBounds<T>,
    lambda: MixWeight<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    family.check_vector(y, "companion y")?;
    let plus = mixture(x, y, lambda, Sign::Plus)?;
    let minus = mixture(x, y, lambda, Sign::Minus)?;
    let c_plus = condition(&plus, family, bounds, "lambda*x + (1-lambda)*y", opts)?;
    let c_minus = condition(&minus, family, bounds, "lambda*x - (1-lambda)*y", opts)?;
    let cx = family.coefficients_unchecked(x);
    let cy = family.coefficients_unchecked(y);
    let left = gruess_residual(x, y, &cx, &cy).re.abs();
    let k = (lambda.get() * lambda.complement()).recip();
    let outer = bounds.spread_sqr() * k / T::lit(16.0);
    Ok(BoundReport::assemble(
        Theorem::CompanionAbs,
        left,
        outer,
        outer,
        vec![c_plus, c_minus],
        opts,
    ))
}
