//! Equality witnesses and randomized tightness probes for every bound.
//!
//! The ratio of interest is `left_value / outer_bound`: a value of 1 means
//! the constant in the outer term is attained, and no admissible input may
//! push it above 1.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bessel_counterpart_b1, bessel_counterpart_b2, companion_abs, companion_bound, compare_b1_b2,
    gruess_v1, gruess_v2, lemma21_bound, BoundOptions, BoundReport, Theorem,
};
use crate::conditions::{BallSampler, BoxBounds, MixWeight};
use crate::error::{Error, Result};
use crate::quadrature::{
    integral_bessel, integral_gruess, FunctionFamily, FunctionSample, QuadratureSpace, Rule,
};
use crate::space::{gram_schmidt, Mode, OrthonormalFamily, Vector};

/// Share of probes placed exactly on the sphere of the ball condition.
pub const BOUNDARY_FRACTION: f64 = 0.1;

/// Slack allowed above ratio 1 before a probe counts as a soundness violation.
pub const SOUNDNESS_SLACK: f64 = 1e-9;

/// Everything needed to evaluate one theorem on one input.
///
/// `lemma21` uses the box midpoints as centers and the box radius as `r`.
/// Integral tags read the vectors as samples on a table rule with unit
/// weights and density, so the embedding is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeInstance {
    pub theorem: Theorem,
    pub family: OrthonormalFamily<f64>,
    pub x: Vector<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<Vector<f64>>,
    pub box_x: BoxBounds<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub box_y: Option<BoxBounds<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<MixWeight<f64>>,
}

impl ProbeInstance {
    fn y_or_err(&self) -> Result<&Vector<f64>> {
        self.y
            .as_ref()
            .ok_or_else(|| Error::Domain(format!("{} needs a second vector", self.theorem)))
    }

    fn box_y_or_err(&self) -> Result<&BoxBounds<f64>> {
        self.box_y
            .as_ref()
            .ok_or_else(|| Error::Domain(format!("{} needs a second box", self.theorem)))
    }

    fn lambda_or_err(&self) -> Result<MixWeight<f64>> {
        self.lambda
            .ok_or_else(|| Error::Domain(format!("{} needs lambda", self.theorem)))
    }

    /// Evaluates the instance's theorem.
    pub fn evaluate(&self, opts: &BoundOptions<f64>) -> Result<BoundReport<f64>> {
        let (x, fam, bx) = (&self.x, &self.family, &self.box_x);
        match self.theorem {
            Theorem::Lemma21 => lemma21_bound(x, fam, &bx.midpoints(), bx.radius(), opts),
            Theorem::BesselB1 => bessel_counterpart_b1(x, fam, bx, opts),
            Theorem::BesselB2 => bessel_counterpart_b2(x, fam, bx, opts),
            Theorem::Compare => compare_b1_b2(x, fam, bx, opts).map(|c| c.report),
            Theorem::GruessV1 => {
                gruess_v1(x, self.y_or_err()?, fam, bx, self.box_y_or_err()?, opts)
            }
            Theorem::GruessV2 => {
                gruess_v2(x, self.y_or_err()?, fam, bx, self.box_y_or_err()?, opts)
            }
            Theorem::Companion => {
                companion_bound(x, self.y_or_err()?, fam, bx, self.lambda_or_err()?, opts)
            }
            Theorem::CompanionAbs => {
                companion_abs(x, self.y_or_err()?, fam, bx, self.lambda_or_err()?, opts)
            }
            Theorem::IntegralBessel => {
                let (functions, f) = self.as_functions(x)?;
                integral_bessel(&f, &functions, bx, opts)
            }
            Theorem::IntegralGruess => {
                let (functions, f) = self.as_functions(x)?;
                let g = FunctionSample::new(
                    functions.space().clone(),
                    self.y_or_err()?.coords().to_vec(),
                )?;
                integral_gruess(&f, &g, &functions, bx, self.box_y_or_err()?, opts)
            }
        }
    }

    fn as_functions(&self, x: &Vector<f64>) -> Result<(FunctionFamily<f64>, FunctionSample<f64>)> {
        let space = Arc::new(unit_table_space(self.family.dim(), self.family.mode())?);
        let samples = self
            .family
            .members()
            .iter()
            .map(|e| FunctionSample::new(space.clone(), e.coords().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let f = FunctionSample::new(space, x.coords().to_vec())?;
        Ok((
            FunctionFamily {
                samples,
                family: self.family.clone(),
            },
            f,
        ))
    }

    fn into_mode(self, mode: Mode) -> Result<Self> {
        if self.x.mode() == mode {
            return Ok(self);
        }
        let convert = |v: &Vector<f64>| Vector::new(v.coords().to_vec(), mode);
        let members = self
            .family
            .members()
            .iter()
            .map(convert)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family: OrthonormalFamily::new(
                members,
                Some(self.family.labels().to_vec()),
                self.family.gram_tolerance(),
            )?,
            x: convert(&self.x)?,
            y: self.y.as_ref().map(convert).transpose()?,
            ..self
        })
    }
}

/// `n` nodes 0, 1, …, n−1 with unit weights and density.
fn unit_table_space(n: usize, mode: Mode) -> Result<QuadratureSpace<f64>> {
    let nodes: Vec<f64> = (0..n).map(|k| k as f64).collect();
    QuadratureSpace::new(
        (0.0, (n - 1) as f64),
        Rule::Table,
        nodes,
        vec![1.0; n],
        vec![1.0; n],
        mode,
    )
}

/// The equality case in ℝ²: F = {1}, e = (1/√2, 1/√2), φ = −m, Φ = m,
/// x = (m/√2, −m/√2). For two-vector tags y = x with the same box; the
/// companion tags use λ = ½.
pub fn equality_witness(theorem: Theorem, m: f64) -> Result<ProbeInstance> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain(format!(
            "witness scale m = {m} must be positive"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let family = OrthonormalFamily::new(
        vec![Vector::from_real(&[s, s])?],
        None,
        crate::real::tol::GRAM,
    )?;
    let x = Vector::from_real(&[m * s, -m * s])?;
    let box_x = BoxBounds::from_real(&[-m], &[m])?;
    Ok(ProbeInstance {
        theorem,
        family,
        y: theorem.needs_y().then(|| x.clone()),
        box_y: theorem.needs_box_y().then(|| box_x.clone()),
        lambda: theorem.needs_lambda().then(MixWeight::half),
        x,
        box_x,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub theorem: Theorem,
    pub dim: usize,
    pub family_size: usize,
    pub probes: usize,
    pub seed: u64,
    /// Companion tags only; defaults to ½ there.
    pub lambda: Option<f64>,
    pub mode: Mode,
}

impl ProbeConfig {
    pub fn new(theorem: Theorem, dim: usize, family_size: usize, probes: usize, seed: u64) -> Self {
        Self {
            theorem,
            dim,
            family_size,
            probes,
            seed,
            lambda: None,
            mode: Mode::Real,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    fn validate(&self) -> Result<Option<MixWeight<f64>>> {
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.family_size == 0 || self.family_size > self.dim {
            return Err(Error::FamilyTooLarge {
                size: self.family_size,
                dim: self.dim,
            });
        }
        if self.probes == 0 {
            return Err(Error::Domain("probe count must be at least 1".into()));
        }
        if self.theorem.needs_lambda() {
            Ok(Some(match self.lambda {
                Some(l) => MixWeight::new(l)?,
                None => MixWeight::half(),
            }))
        } else {
            Ok(None)
        }
    }

    fn witness_seeded(&self) -> bool {
        self.dim == 2 && self.family_size == 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub theorem: Theorem,
    /// max(0, max over probes of left_value / outer_bound).
    pub best_ratio: f64,
    pub best_probe: Option<usize>,
    pub witness: Option<ProbeInstance>,
    pub probes: usize,
    /// Probes whose hypothesis check failed under rounding and were skipped.
    pub rejected: usize,
    /// Probes with left_value > outer_bound · (1 + 1e−9).
    pub violations: usize,
    /// Probes whose report had `chain_ok == false`.
    pub chain_violations: usize,
    pub lambda: Option<f64>,
    pub seed: u64,
    pub dim: usize,
    pub family_size: usize,
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug)]
struct ProbeOutcome {
    index: usize,
    ratio: Option<f64>,
    rejected: bool,
    violation: bool,
    chain_violation: bool,
}

/// Runs `probes` independent random feasible instances of one theorem.
///
/// Probe `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so results do
/// not depend on thread count. With `dim = 2, family_size = 1`, probe 0 is
/// the equality witness.
pub fn probe(config: &ProbeConfig) -> Result<SharpnessResult> {
    let lambda = config.validate()?;
    let opts = BoundOptions::default();
    let outcomes: Vec<ProbeOutcome> = (0..config.probes)
        .into_par_iter()
        .map(|index| {
            let instance = probe_instance(config, lambda, index);
            let mut out = ProbeOutcome {
                index,
                ratio: None,
                rejected: false,
                violation: false,
                chain_violation: false,
            };
            match instance.and_then(|inst| inst.evaluate(&opts)) {
                Ok(rep) => {
                    out.ratio = rep.ratio();
                    out.violation = rep.left_value > rep.outer_bound * (1.0 + SOUNDNESS_SLACK);
                    out.chain_violation = !rep.chain_ok;
                }
                Err(Error::Hypothesis { .. }) => out.rejected = true,
                Err(e) => return Err(e),
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let best = outcomes
        .iter()
        .filter_map(|o| o.ratio.map(|r| (o.index, r)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
    let witness = best
        .map(|(i, _)| probe_instance(config, lambda, i))
        .transpose()?;
    Ok(SharpnessResult {
        theorem: config.theorem,
        best_ratio: best.map_or(0.0, |(_, r)| r.max(0.0)),
        best_probe: best.map(|(i, _)| i),
        witness,
        probes: config.probes,
        rejected: outcomes.iter().filter(|o| o.rejected).count(),
        violations: outcomes.iter().filter(|o| o.violation).count(),
        chain_violations: outcomes.iter().filter(|o| o.chain_violation).count(),
        lambda: lambda.map(MixWeight::get),
        seed: config.seed,
        dim: config.dim,
        family_size: config.family_size,
        mode: config.mode,
    })
}

/// Deterministic instance number `index` of a probe run.
pub fn probe_instance(
    config: &ProbeConfig,
    lambda: Option<MixWeight<f64>>,
    index: usize,
) -> Result<ProbeInstance> {
    if index == 0 && config.witness_seeded() {
        let mut w = equality_witness(config.theorem, 1.0)?;
        w.lambda = lambda;
        return w.into_mode(config.mode);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    random_instance(&mut rng, config, lambda)
}

fn gaussian_scalar<R: Rng>(rng: &mut R, mode: Mode) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = match mode {
        Mode::Real => 0.0,
        Mode::Complex => StandardNormal.sample(rng),
    };
    Complex64::new(re, im)
}

fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize, mode: Mode) -> Result<Vector<f64>> {
    Vector::new((0..dim).map(|_| gaussian_scalar(rng, mode)).collect(), mode)
}

fn random_family<R: Rng>(
    rng: &mut R,
    dim: usize,
    size: usize,
    mode: Mode,
) -> Result<OrthonormalFamily<f64>> {
    loop {
        let raw = (0..size)
            .map(|_| gaussian_vector(rng, dim, mode))
            .collect::<Result<Vec<_>>>()?;
        let gs = gram_schmidt(&raw, 1e-8)?;
        if gs.family.len() == size {
            return Ok(gs.family);
        }
    }
}

/// Random nondegenerate box at a random scale in [1e−2, 1e2].
pub fn random_box<R: Rng>(rng: &mut R, size: usize, mode: Mode) -> Result<BoxBounds<f64>> {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let mut lower = Vec::with_capacity(size);
    let mut upper = Vec::with_capacity(size);
    for _ in 0..size {
        let lo = gaussian_scalar(rng, mode) * scale;
        let mut gap = gaussian_scalar(rng, mode) * scale;
        if gap.norm() < 1e-3 * scale {
            gap = Complex64::new(scale, 0.0);
        }
        lower.push(lo);
        upper.push(lo + gap);
    }
    BoxBounds::new(lower, upper)
}

fn random_instance<R: Rng>(
    rng: &mut R,
    config: &ProbeConfig,
    lambda: Option<MixWeight<f64>>,
) -> Result<ProbeInstance> {
    let (dim, size, mode) = (config.dim, config.family_size, config.mode);
    let family = random_family(rng, dim, size, mode)?;
    let box_x = random_box(rng, size, mode)?;
    let ball = BallSampler::new(&family, &box_x, BOUNDARY_FRACTION)?;
    let theorem = config.theorem;
    let (x, y, box_y) = match theorem {
        Theorem::GruessV1 | Theorem::GruessV2 | Theorem::IntegralGruess => {
            let box_y = random_box(rng, size, mode)?;
            let x = ball.sample(rng);
            let y = BallSampler::new(&family, &box_y, BOUNDARY_FRACTION)?.sample(rng);
            (x, Some(y), Some(box_y))
        }
        Theorem::Companion => {
            let l = lambda.expect("validated");
            let z = ball.sample(rng);
            let spread = ball.radius() * rng.random_range(0.0..4.0);
            let y = gaussian_vector(rng, dim, mode)?.scale_real(spread / (dim as f64).sqrt());
            let x = z.affine(1.0 / l.get(), &y, -l.complement() / l.get())?;
            (x, Some(y), None)
        }
        Theorem::CompanionAbs => {
            let l = lambda.expect("validated");
            let plus = ball.sample(rng);
            let minus = ball.sample(rng);
            let x = plus.affine(0.5 / l.get(), &minus, 0.5 / l.get())?;
            let y = plus.affine(0.5 / l.complement(), &minus, -0.5 / l.complement())?;
            (x, Some(y), None)
        }
        _ => (ball.sample(rng), None, None),
    };
    Ok(ProbeInstance {
        theorem,
        family,
        x,
        y,
        box_x,
        box_y,
        lambda,
    })
}
