//! Finite coordinate inner product spaces over ℝ or ℂ and orthonormal families in them.
//!
//! Real spaces are complex spaces whose coordinates all have zero imaginary
//! part, so every formula downstream is written once over `Complex<T>`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{is_finite_scalar, real, tol, Real, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Complex,
}

/// A coordinate vector. Invariants: at least one coordinate, all finite,
/// and zero imaginary parts in real mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector<T>", bound = "T: Real")]
pub struct Vector<T> {
    coords: Vec<Scalar<T>>,
    mode: Mode,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real")]
struct RawVector<T> {
    coords: Vec<Scalar<T>>,
    mode: Mode,
}

impl<T: Real> TryFrom<RawVector<T>> for Vector<T> {
    type Error = Error;

    fn try_from(raw: RawVector<T>) -> Result<Self> {
        Vector::new(raw.coords, raw.mode)
    }
}

impl<T: Real> Vector<T> {
    pub fn new(coords: Vec<Scalar<T>>, mode: Mode) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !coords.iter().all(is_finite_scalar) {
            return Err(Error::NonFinite {
                what: "vector coordinate",
            });
        }
        if mode == Mode::Real && coords.iter().any(|z| z.im != T::zero()) {
            return Err(Error::ComplexInRealMode { what: "vector" });
        }
        Ok(Self { coords, mode })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| real(v)).collect(), Mode::Real)
    }

    pub fn from_complex(coords: Vec<Scalar<T>>) -> Result<Self> {
        Self::new(coords, Mode::Complex)
    }

    pub fn zeros(dim: usize, mode: Mode) -> Result<Self> {
        Self::new(vec![Scalar::new(T::zero(), T::zero()); dim], mode)
    }

    /// The `k`-th canonical basis vector.
    pub fn unit(dim: usize, k: usize, mode: Mode) -> Result<Self> {
        if k >= dim {
            return Err(Error::Shape {
                what: "unit vector index",
                expected: dim,
                actual: k,
            });
        }
        let mut v = Self::zeros(dim, mode)?;
        v.coords[k] = real(T::one());
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn coords(&self) -> &[Scalar<T>] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar<T>> {
        self.coords
    }

    pub fn norm_sqr(&self) -> T {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn check_compatible(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Shape {
                what,
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch {
                what,
                expected: self.mode,
                actual: other.mode,
            });
        }
        Ok(())
    }

    /// `a·self + b·other`. Shapes must already agree; in real mode the
    /// coefficients must be real.
    pub(crate) fn combine(&self, a: Scalar<T>, other: &Self, b: Scalar<T>) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&u, &v)| u * a + v * b)
                .collect(),
            mode: self.mode,
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        self.combine(real(T::one()), other, real(-T::one()))
    }

    pub(crate) fn scale_real(&self, t: T) -> Self {
        Self {
            coords: self.coords.iter().map(|&z| z * t).collect(),
            mode: self.mode,
        }
    }

    /// Checked `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "vector subtraction")?;
        Ok(self.sub_unchecked(other))
    }

    /// Checked `a·self + b·other` with real weights.
    pub fn affine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_compatible(other, "vector combination")?;
        Ok(self.combine(real(a), other, real(b)))
    }
}

/// Coordinate inner product Σ x_k · conj(y_k), linear in the first slot.
pub fn inner<T: Real>(x: &Vector<T>, y: &Vector<T>) -> Result<Scalar<T>> {
    x.check_compatible(y, "inner product")?;
    Ok(inner_unchecked(x, y))
}

pub(crate) fn inner_unchecked<T: Real>(x: &Vector<T>, y: &Vector<T>) -> Scalar<T> {
    x.coords
        .iter()
        .zip(&y.coords)
        .fold(Scalar::new(T::zero(), T::zero()), |acc, (&a, &b)| {
            acc + a * b.conj()
        })
}

pub fn norm<T: Real>(x: &Vector<T>) -> T {
    x.norm()
}

/// A finite orthonormal family {e_i}, i ∈ F, whose Gram matrix is within
/// `gram_tolerance` of the identity entrywise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily<T>", bound = "T: Real")]
pub struct OrthonormalFamily<T> {
    members: Vec<Vector<T>>,
    labels: Vec<String>,
    gram_tolerance: T,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real")]
struct RawFamily<T> {
    members: Vec<Vector<T>>,
    labels: Vec<String>,
    gram_tolerance: T,
}

impl<T: Real> TryFrom<RawFamily<T>> for OrthonormalFamily<T> {
    type Error = Error;

    fn try_from(raw: RawFamily<T>) -> Result<Self> {
        OrthonormalFamily::new(raw.members, Some(raw.labels), raw.gram_tolerance)
    }
}

impl<T: Real> OrthonormalFamily<T> {
    /// Validates and wraps `members`. Labels default to `e0, e1, …`.
    pub fn new(
        members: Vec<Vector<T>>,
        labels: Option<Vec<String>>,
        gram_tolerance: T,
    ) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        if !(gram_tolerance.is_finite() && gram_tolerance >= T::zero()) {
            return Err(Error::Domain(
                "gram tolerance must be finite and nonnegative".into(),
            ));
        }
        for m in &members[1..] {
            first.check_compatible(m, "family member")?;
        }
        if members.len() > first.dim() {
            return Err(Error::FamilyTooLarge {
                size: members.len(),
                dim: first.dim(),
            });
        }
        let labels = match labels {
            Some(l) if l.len() != members.len() => {
                return Err(Error::Shape {
                    what: "family labels",
                    expected: members.len(),
                    actual: l.len(),
                })
            }
            Some(l) => l,
            None => (0..members.len()).map(|i| format!("e{i}")).collect(),
        };
        let family = Self {
            members,
            labels,
            gram_tolerance,
        };
        if let Some((i, j, deviation)) = family.worst_gram_entry() {
            if deviation > gram_tolerance {
                return Err(Error::NotOrthonormal {
                    i,
                    j,
                    deviation: deviation.to_f64_lossy(),
                    tolerance: gram_tolerance.to_f64_lossy(),
                });
            }
        }
        Ok(family)
    }

    /// The canonical basis vectors with the given indices.
    pub fn canonical(dim: usize, indices: &[usize], mode: Mode) -> Result<Self> {
        let members = indices
            .iter()
            .map(|&k| Vector::unit(dim, k, mode))
            .collect::<Result<Vec<_>>>()?;
        let labels = indices.iter().map(|k| format!("e{k}")).collect();
        Self::new(members, Some(labels), T::lit(tol::GRAM))
    }

    pub fn members(&self) -> &[Vector<T>] {
        &self.members
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram_tolerance(&self) -> T {
        self.gram_tolerance
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn mode(&self) -> Mode {
        self.members[0].mode()
    }

    /// max_{i,j} |⟨e_i, e_j⟩ − δ_ij|.
    pub fn max_gram_error(&self) -> T {
        self.worst_gram_entry().map_or(T::zero(), |(_, _, d)| d)
    }

    fn worst_gram_entry(&self) -> Option<(usize, usize, T)> {
        let mut worst: Option<(usize, usize, T)> = None;
        for (i, ei) in self.members.iter().enumerate() {
            for (j, ej) in self.members.iter().enumerate().skip(i) {
                let delta = if i == j { T::one() } else { T::zero() };
                let dev = (inner_unchecked(ei, ej) - delta).norm();
                if worst.is_none_or(|(_, _, w)| dev > w) {
                    worst = Some((i, j, dev));
                }
            }
        }
        worst
    }

    /// Rejects `x` unless it lives in the family's space.
    pub fn check_vector(&self, x: &Vector<T>, what: &'static str) -> Result<()> {
        self.members[0].check_compatible(x, what)
    }

    /// Rejects coefficient lists of the wrong length or with complex entries in real mode.
    pub fn check_coefficients(&self, coeffs: &[Scalar<T>], what: &'static str) -> Result<()> {
        if coeffs.len() != self.len() {
            return Err(Error::Shape {
                what,
                expected: self.len(),
                actual: coeffs.len(),
            });
        }
        if self.mode() == Mode::Real && coeffs.iter().any(|c| c.im != T::zero()) {
            return Err(Error::ComplexInRealMode { what });
        }
        Ok(())
    }

    /// Σ c_i e_i.
    pub fn combination(&self, coeffs: &[Scalar<T>]) -> Result<Vector<T>> {
        self.check_coefficients(coeffs, "combination coefficients")?;
        Ok(self.combination_unchecked(coeffs))
    }

    pub(crate) fn combination_unchecked(&self, coeffs: &[Scalar<T>]) -> Vector<T> {
        let dim = self.dim();
        let mut coords = vec![Scalar::new(T::zero(), T::zero()); dim];
        for (c, e) in coeffs.iter().zip(&self.members) {
            for (acc, &v) in coords.iter_mut().zip(e.coords()) {
                *acc = *acc + v * c;
            }
        }
        Vector {
            coords,
            mode: self.mode(),
        }
    }

    pub(crate) fn coefficients_unchecked(&self, x: &Vector<T>) -> Vec<Scalar<T>> {
        self.members.iter().map(|e| inner_unchecked(x, e)).collect()
    }
}

/// ⟨x, e_i⟩ in family order.
pub fn fourier_coefficients<T: Real>(
    x: &Vector<T>,
    family: &OrthonormalFamily<T>,
) -> Result<Vec<Scalar<T>>> {
    family.check_vector(x, "fourier coefficients")?;
    Ok(family.coefficients_unchecked(x))
}

/// Result of [`gram_schmidt`]: the family plus the input indices dropped as dependent.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSchmidt<T> {
    pub family: OrthonormalFamily<T>,
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
///
/// An input is dropped when its residual after projection is below
/// `tolerance · max(1, ‖v‖)`. Member labels carry the original input index.
pub fn gram_schmidt<T: Real>(vectors: &[Vector<T>], tolerance: T) -> Result<GramSchmidt<T>> {
    let first = vectors.first().ok_or(Error::EmptyFamily)?;
    for v in &vectors[1..] {
        first.check_compatible(v, "gram_schmidt input")?;
    }
    let mut basis: Vec<Vector<T>> = Vec::new();
    let mut labels = Vec::new();
    let mut dropped = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = inner_unchecked(&w, q);
                w = w.combine(real(T::one()), q, -c);
            }
        }
        let residual = w.norm();
        if basis.len() == first.dim() || residual < tolerance * v.norm().max(T::one()) {
            dropped.push(idx);
            continue;
        }
        let mut q = w.scale_real(residual.recip());
        if q.mode == Mode::Real {
            // scrub round-off so the real-mode invariant holds exactly
            for z in &mut q.coords {
                z.im = T::zero();
            }
        }
        basis.push(q);
        labels.push(format!("e{idx}"));
    }
    if basis.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let family = OrthonormalFamily::new(basis, Some(labels), tolerance.max(T::lit(tol::GRAM)))?;
    Ok(GramSchmidt { family, dropped })
}
