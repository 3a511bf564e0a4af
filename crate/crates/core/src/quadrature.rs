//! Weighted L²_ρ spaces realized through a quadrature rule.
//!
//! A rule with nodes `s_k`, weights `w_k` and sampled density `ρ_k` turns
//! ∫ ρ f ḡ dμ into Σ_k w_k ρ_k f(s_k) conj(g(s_k)). Scaling each sample by
//! √(w_k ρ_k) makes this the plain coordinate inner product, so every
//! coordinate-space bound applies unchanged to function samples.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::{bessel_counterpart_b2, gruess_v2, BoundOptions, BoundReport, Theorem};
use crate::conditions::BoxBounds;
use crate::error::{Error, Result};
use crate::real::{is_finite_scalar, real, tol, Real, Scalar};
use crate::space::{gram_schmidt, inner, Mode, OrthonormalFamily, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Composite trapezoid for periodic integrands: `n` equispaced nodes
    /// `a + k(b−a)/n`, each weighted `(b−a)/n`.
    Trapezoid,
    GaussLegendre,
    /// Caller-supplied nodes and weights.
    Table,
}

/// Nodes, weights and sampled density on Ω = [a, b].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct QuadratureSpace<T> {
    interval: (T, T),
    rule: Rule,
    nodes: Vec<T>,
    weights: Vec<T>,
    density: Vec<T>,
    mode: Mode,
}

impl<T: Real> QuadratureSpace<T> {
    /// Validates a full node/weight/density table.
    pub fn new(
        interval: (T, T),
        rule: Rule,
        nodes: Vec<T>,
        weights: Vec<T>,
        density: Vec<T>,
        mode: Mode,
    ) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::Domain(format!("interval [{a}, {b}] is invalid")));
        }
        if nodes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (what, len) in [
            ("quadrature weights", weights.len()),
            ("density samples", density.len()),
        ] {
            if len != nodes.len() {
                return Err(Error::Shape {
                    what,
                    expected: nodes.len(),
                    actual: len,
                });
            }
        }
        if !nodes.iter().all(|&s| s.is_finite() && s >= a && s <= b) {
            return Err(Error::Domain(
                "nodes must be finite and inside the interval".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("nodes must be strictly increasing".into()));
        }
        if !weights.iter().all(|&w| w.is_finite() && w > T::zero()) {
            return Err(Error::Domain("weights must be positive and finite".into()));
        }
        if !density.iter().all(|&r| r.is_finite() && r >= T::zero()) {
            return Err(Error::Domain(
                "density must be nonnegative and finite".into(),
            ));
        }
        let mass: T = weights.iter().zip(&density).map(|(&w, &r)| w * r).sum();
        if mass.is_nan() || mass <= T::zero() {
            return Err(Error::Domain(
                "the discretized measure has zero mass".into(),
            ));
        }
        Ok(Self {
            interval,
            rule,
            nodes,
            weights,
            density,
            mode,
        })
    }

    /// Periodic composite trapezoid with unit density.
    pub fn trapezoid(a: T, b: T, n: usize, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let h = (b - a) / T::lit(n as f64);
        let nodes = (0..n).map(|k| a + h * T::lit(k as f64)).collect();
        Self::new(
            (a, b),
            Rule::Trapezoid,
            nodes,
            vec![h; n],
            vec![T::one(); n],
            mode,
        )
    }

    /// `n`-point Gauss–Legendre rule on [a, b] with unit density.
    pub fn gauss_legendre(a: T, b: T, n: usize, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let (xs, ws) = gauss_legendre_unit(n);
        let half = (b.to_f64_lossy() - a.to_f64_lossy()) / 2.0;
        let mid = (b.to_f64_lossy() + a.to_f64_lossy()) / 2.0;
        let nodes = xs.iter().map(|&x| T::lit(mid + half * x)).collect();
        let weights = ws.iter().map(|&w| T::lit(half * w)).collect();
        Self::new(
            (a, b),
            Rule::GaussLegendre,
            nodes,
            weights,
            vec![T::one(); n],
            mode,
        )
    }

    /// Replaces the density by `rho(s_k)` at every node.
    pub fn with_density(self, rho: impl Fn(T) -> T) -> Result<Self> {
        let density = self.nodes.iter().map(|&s| rho(s)).collect();
        self.with_density_values(density)
    }

    pub fn with_density_values(self, density: Vec<T>) -> Result<Self> {
        Self::new(
            self.interval,
            self.rule,
            self.nodes,
            self.weights,
            density,
            self.mode,
        )
    }

    pub fn interval(&self) -> (T, T) {
        self.interval
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn density(&self) -> &[T] {
        &self.density
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// w_k · ρ_k; nodes where this vanishes are null for the measure.
    pub fn mass_at(&self, k: usize) -> T {
        self.weights[k] * self.density[k]
    }
}

/// Nodes (ascending) and weights of the `n`-point rule on [−1, 1], by Newton
/// iteration on the three-term Legendre recurrence.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values of one function at every node of a space.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionSample<T> {
    values: Vec<Scalar<T>>,
    space: Arc<QuadratureSpace<T>>,
}

impl<T: Real> FunctionSample<T> {
    pub fn new(space: Arc<QuadratureSpace<T>>, values: Vec<Scalar<T>>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Shape {
                what: "function samples",
                expected: space.len(),
                actual: values.len(),
            });
        }
        if !values.iter().all(is_finite_scalar) {
            return Err(Error::NonFinite {
                what: "function sample",
            });
        }
        if space.mode() == Mode::Real && values.iter().any(|z| z.im != T::zero()) {
            return Err(Error::ComplexInRealMode {
                what: "function sample",
            });
        }
        Ok(Self { values, space })
    }

    pub fn from_fn(space: Arc<QuadratureSpace<T>>, f: impl Fn(T) -> Scalar<T>) -> Result<Self> {
        let values = space.nodes().iter().map(|&s| f(s)).collect();
        Self::new(space, values)
    }

    pub fn from_real_fn(space: Arc<QuadratureSpace<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_fn(space, |s| real(f(s)))
    }

    pub fn values(&self) -> &[Scalar<T>] {
        &self.values
    }

    pub fn space(&self) -> &Arc<QuadratureSpace<T>> {
        &self.space
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// Isometric image of a sample in coordinate space: `√(w_k ρ_k) · f(s_k)`.
pub fn embed<T: Real>(f: &FunctionSample<T>) -> Vector<T> {
    let space = f.space();
    let coords = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| v * space.mass_at(k).sqrt())
        .collect();
    Vector::new(coords, space.mode()).expect("embedding preserves the sample invariants")
}

/// Σ_k w_k ρ_k f(s_k) conj(g(s_k)), evaluated as the coordinate inner product
/// of the embeddings so the two agree bit for bit.
pub fn weighted_inner<T: Real>(f: &FunctionSample<T>, g: &FunctionSample<T>) -> Result<Scalar<T>> {
    f.check_same_space(g)?;
    inner(&embed(f), &embed(g))
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind<T> {
    /// 1/√(2π), cos(ks)/√π, sin(ks)/√π, … on [0, 2π].
    Fourier,
    /// √((2n+1)/2) P_n on [−1, 1].
    Legendre,
    /// Gram–Schmidt of the given samples in the weighted inner product.
    Custom(Vec<FunctionSample<T>>),
}

/// A family of functions together with its embedded orthonormal family.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionFamily<T> {
    pub samples: Vec<FunctionSample<T>>,
    pub family: OrthonormalFamily<T>,
}

impl<T: Real> FunctionFamily<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn space(&self) -> &Arc<QuadratureSpace<T>> {
        self.samples[0].space()
    }

    fn check_sample(&self, f: &FunctionSample<T>) -> Result<()> {
        self.samples[0].check_same_space(f)
    }
}

/// Builds `count` orthonormal functions of the requested kind and validates
/// the embedded family with Gram tolerance 1e−8.
pub fn build_family<T: Real>(
    kind: FamilyKind<T>,
    count: usize,
    space: &Arc<QuadratureSpace<T>>,
) -> Result<FunctionFamily<T>> {
    if count == 0 {
        return Err(Error::EmptyFamily);
    }
    if count > space.len() {
        return Err(Error::Resolution(format!(
            "{count} functions need at least {count} nodes, the rule has {}",
            space.len()
        )));
    }
    let (samples, labels) = match kind {
        FamilyKind::Fourier => fourier_samples(count, space)?,
        FamilyKind::Legendre => legendre_samples(count, space)?,
        FamilyKind::Custom(inputs) => return custom_family(inputs, count, space),
    };
    let embedded = samples.iter().map(embed).collect();
    let family = OrthonormalFamily::new(embedded, Some(labels), T::lit(tol::FAMILY))?;
    Ok(FunctionFamily { samples, family })
}

fn close_to<T: Real>(value: T, target: f64) -> bool {
    (value.to_f64_lossy() - target).abs() <= 1e-6 * target.abs().max(1.0)
}

type Samples<T> = (Vec<FunctionSample<T>>, Vec<String>);

fn fourier_samples<T: Real>(count: usize, space: &Arc<QuadratureSpace<T>>) -> Result<Samples<T>> {
    let (a, b) = space.interval();
    if !close_to(a, 0.0) || !close_to(b, 2.0 * std::f64::consts::PI) {
        return Err(Error::Domain(
            "the fourier family lives on [0, 2*pi]".into(),
        ));
    }
    let max_freq = count / 2;
    if space.len() <= 2 * max_freq {
        return Err(Error::Resolution(format!(
            "frequency {max_freq} aliases on {} nodes",
            space.len()
        )));
    }
    let c0 = T::one() / (T::lit(2.0) * T::PI()).sqrt();
    let c = T::one() / T::PI().sqrt();
    let mut samples = vec![FunctionSample::from_real_fn(space.clone(), |_| c0)?];
    let mut labels = vec!["const".to_string()];
    for j in 1..count {
        let k = T::lit((j.div_ceil(2)) as f64);
        let (f, label): (Box<dyn Fn(T) -> T>, _) = if j % 2 == 1 {
            (
                Box::new(move |s: T| c * (k * s).cos()),
                format!("cos{}", j.div_ceil(2)),
            )
        } else {
            (
                Box::new(move |s: T| c * (k * s).sin()),
                format!("sin{}", j.div_ceil(2)),
            )
        };
        samples.push(FunctionSample::from_real_fn(space.clone(), f)?);
        labels.push(label);
    }
    Ok((samples, labels))
}

fn legendre_samples<T: Real>(count: usize, space: &Arc<QuadratureSpace<T>>) -> Result<Samples<T>> {
    let (a, b) = space.interval();
    if !close_to(a, -1.0) || !close_to(b, 1.0) {
        return Err(Error::Domain("the legendre family lives on [-1, 1]".into()));
    }
    let samples = (0..count)
        .map(|n| {
            let norm = T::lit(((2 * n + 1) as f64 / 2.0).sqrt());
            FunctionSample::from_real_fn(space.clone(), |s| {
                norm * T::lit(legendre_with_derivative(n, s.to_f64_lossy()).0)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..count).map(|n| format!("P{n}")).collect();
    Ok((samples, labels))
}

fn custom_family<T: Real>(
    inputs: Vec<FunctionSample<T>>,
    count: usize,
    space: &Arc<QuadratureSpace<T>>,
) -> Result<FunctionFamily<T>> {
    let probe = FunctionSample::new(space.clone(), vec![real(T::zero()); space.len()])?;
    for f in &inputs {
        probe.check_same_space(f)?;
    }
    let embedded: Vec<_> = inputs.iter().map(embed).collect();
    let gs = match gram_schmidt(&embedded, T::lit(tol::GRAM)) {
        Ok(gs) => gs,
        Err(Error::EmptyFamily) => {
            return Err(Error::Dependence {
                requested: count,
                independent: 0,
            })
        }
        Err(e) => return Err(e),
    };
    if gs.family.len() < count {
        return Err(Error::Dependence {
            requested: count,
            independent: gs.family.len(),
        });
    }
    let members: Vec<_> = gs.family.members()[..count].to_vec();
    let labels = gs.family.labels()[..count].to_vec();
    let samples = members
        .iter()
        .map(|v| {
            let values = v
                .coords()
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    let m = space.mass_at(k);
                    if m > T::zero() {
                        c / m.sqrt()
                    } else {
                        real(T::zero())
                    }
                })
                .collect();
            FunctionSample::new(space.clone(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = OrthonormalFamily::new(members, Some(labels), T::lit(tol::FAMILY))?;
    Ok(FunctionFamily { samples, family })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck<T> {
    pub holds: bool,
    /// Node indices where an envelope is crossed by more than the slack.
    pub violating_nodes: Vec<usize>,
    /// Σ_k w_k ρ_k (U_k − f_k)(f_k − L_k): the embedded bilinear form.
    pub embedded_re_form: T,
}

/// Checks Σ m_i f_i(s) ≤ f(s) ≤ Σ M_i f_i(s) at every node of positive mass
/// (real spaces only), with 1e−12 absolute slack.
pub fn pointwise_box_check<T: Real>(
    f: &FunctionSample<T>,
    family_samples: &[FunctionSample<T>],
    bounds: &BoxBounds<T>,
) -> Result<PointwiseCheck<T>> {
    if f.space().mode() != Mode::Real {
        return Err(Error::RealModeOnly("pointwise_box_check"));
    }
    if family_samples.len() != bounds.len() {
        return Err(Error::Shape {
            what: "pointwise box",
            expected: family_samples.len(),
            actual: bounds.len(),
        });
    }
    for g in family_samples {
        f.check_same_space(g)?;
    }
    if bounds
        .lower()
        .iter()
        .chain(bounds.upper())
        .any(|z| z.im != T::zero())
    {
        return Err(Error::ComplexInRealMode {
            what: "pointwise box",
        });
    }
    let slack = T::lit(tol::POINTWISE);
    let mut violating_nodes = Vec::new();
    let mut re_form = T::zero();
    for (k, v) in f.values().iter().enumerate() {
        let v = v.re;
        let envelope = |coeffs: &[Scalar<T>]| -> T {
            coeffs
                .iter()
                .zip(family_samples)
                .map(|(c, g)| c.re * g.values()[k].re)
                .sum()
        };
        let lo = envelope(bounds.lower());
        let hi = envelope(bounds.upper());
        let mass = f.space().mass_at(k);
        re_form = re_form + mass * (hi - v) * (v - lo);
        if mass > T::zero() && (v < lo - slack || v > hi + slack) {
            violating_nodes.push(k);
        }
    }
    Ok(PointwiseCheck {
        holds: violating_nodes.is_empty(),
        violating_nodes,
        embedded_re_form: re_form,
    })
}

/// Bessel counterpart for ∫ρ|f|² − Σ|∫ρ f f̄_i|², evaluated on the embedding.
pub fn integral_bessel<T: Real>(
    f: &FunctionSample<T>,
    family: &FunctionFamily<T>,
    bounds: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    family.check_sample(f)?;
    Ok(
        bessel_counterpart_b2(&embed(f), &family.family, bounds, opts)?
            .retagged(Theorem::IntegralBessel),
    )
}

/// Grüss-type bound for ∫ρ f ḡ − Σ ∫ρ f f̄_i ∫ρ f_i ḡ, evaluated on the embedding.
pub fn integral_gruess<T: Real>(
    f: &FunctionSample<T>,
    g: &FunctionSample<T>,
    family: &FunctionFamily<T>,
    box_f: &BoxBounds<T>,
    box_g: &BoxBounds<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundReport<T>> {
    family.check_sample(f)?;
    family.check_sample(g)?;
    Ok(
        gruess_v2(&embed(f), &embed(g), &family.family, box_f, box_g, opts)?
            .retagged(Theorem::IntegralGruess),
    )
}
