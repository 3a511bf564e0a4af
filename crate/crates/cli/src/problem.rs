//! The `orthobound/1` input document and its translation into library objects.

use std::sync::Arc;

use anyhow::{anyhow, bail, ensure, Context, Result};
use num_complex::Complex64;
use orthobound::{
    build_family, gram_schmidt, tol, BoxBoundsF64, FamilyKind, FunctionFamily, FunctionSampleF64,
    MixWeight, Mode, OrthonormalFamilyF64, QuadratureSpace, QuadratureSpaceF64, Rule, Theorem,
    VectorF64,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "orthobound/1";

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonScalar> for Complex64 {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Real(re) => Complex64::new(re, 0.0),
            JsonScalar::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn complexify(values: &[JsonScalar]) -> Vec<Complex64> {
    values.iter().copied().map(Complex64::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescription {
    pub schema: String,
    pub mode: Mode,
    pub space: SpaceSpec,
    pub family: FamilySpec,
    #[serde(default)]
    pub vectors: Vectors,
    #[serde(default)]
    pub boxes: Boxes,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Coordinates { dimension: usize },
    Quadrature(QuadratureSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub interval: [f64; 2],
    pub rule: Rule,
    pub node_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    /// Table rule only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<f64>>,
    /// Table rule only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Constant(f64),
    Table(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Canonical {
        indices: Vec<usize>,
    },
    GramSchmidt {
        vectors: Vec<Vec<JsonScalar>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// Already orthonormal; checked against the Gram tolerance.
    Explicit {
        vectors: Vec<Vec<JsonScalar>>,
    },
    Fourier {
        count: usize,
    },
    Legendre {
        count: usize,
    },
}

/// Coordinates, or function values at the quadrature nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorSpec {
    Coordinates(Vec<JsonScalar>),
    Samples {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<f64>>,
        values: Vec<JsonScalar>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vectors {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<VectorSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lower: Vec<JsonScalar>,
    pub upper: Vec<JsonScalar>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boxes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<BoxSpec>,
}

/// Centers and radius for `lemma21`; default to the midpoints and radius of box x.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSpec {
    pub centers: Vec<JsonScalar>,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<f64>,
}

/// Parses a document, naming the failing field on error.
pub fn parse(text: &str) -> Result<ProblemDescription> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let desc: ProblemDescription = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow!(
            "{}: {}",
            if path == "." || path == "?" {
                "document".into()
            } else {
                path
            },
            e.into_inner()
        )
    })?;
    ensure!(
        desc.schema == SCHEMA,
        "schema: expected \"{SCHEMA}\", found \"{}\"",
        desc.schema
    );
    Ok(desc)
}

/// Library objects built from a validated description.
pub struct Problem {
    pub family: OrthonormalFamilyF64,
    /// Present for quadrature spaces.
    pub functions: Option<FunctionFamily<f64>>,
    pub x: Option<VectorF64>,
    pub y: Option<VectorF64>,
    pub f: Option<FunctionSampleF64>,
    pub g: Option<FunctionSampleF64>,
    pub box_x: Option<BoxBoundsF64>,
    pub box_y: Option<BoxBoundsF64>,
    pub lambda: Option<MixWeight<f64>>,
    pub lemma: Option<(Vec<Complex64>, f64)>,
    pub condition_tolerance: f64,
    pub chain_tolerance: f64,
}

impl Problem {
    pub fn build(desc: &ProblemDescription) -> Result<Self> {
        let mode = desc.mode;
        let tolerances = desc.tolerance.clone().unwrap_or_default();
        let gram = tolerances.gram.unwrap_or(tol::GRAM);
        for (field, v) in [
            ("tolerance.condition", tolerances.condition),
            ("tolerance.chain", tolerances.chain),
            ("tolerance.gram", tolerances.gram),
        ] {
            if let Some(v) = v {
                ensure!(
                    v.is_finite() && v >= 0.0,
                    "{field}: must be finite and nonnegative, got {v}"
                );
            }
        }

        let (family, functions, f, g, x, y) = match &desc.space {
            SpaceSpec::Coordinates { dimension } => {
                let family = coordinate_family(&desc.family, *dimension, mode, gram)?;
                let x = coordinate_vector(desc.vectors.x.as_ref(), "vectors.x", *dimension, mode)?;
                let y = coordinate_vector(desc.vectors.y.as_ref(), "vectors.y", *dimension, mode)?;
                (family, None, None, None, x, y)
            }
            SpaceSpec::Quadrature(q) => {
                let space = Arc::new(quadrature_space(q, mode).context("space.quadrature")?);
                let functions = function_family(&desc.family, &space, gram)?;
                let f = sample(desc.vectors.x.as_ref(), "vectors.x", &space)?;
                let g = sample(desc.vectors.y.as_ref(), "vectors.y", &space)?;
                let x = f.as_ref().map(orthobound::embed);
                let y = g.as_ref().map(orthobound::embed);
                (functions.family.clone(), Some(functions), f, g, x, y)
            }
        };

        let box_x = boxed(desc.boxes.x.as_ref(), "boxes.x", &family)?;
        let box_y = boxed(desc.boxes.y.as_ref(), "boxes.y", &family)?;
        let lambda = desc
            .lambda
            .map(|l| MixWeight::new(l).map_err(|e| anyhow!("lambda: {e}")))
            .transpose()?;
        let lemma = match &desc.lemma {
            Some(l) => {
                let centers = complexify(&l.centers);
                family
                    .check_coefficients(&centers, "lemma centers")
                    .map_err(|e| anyhow!("lemma.centers: {e}"))?;
                Some((centers, l.radius))
            }
            None => None,
        };
        Ok(Self {
            family,
            functions,
            x,
            y,
            f,
            g,
            box_x,
            box_y,
            lambda,
            lemma,
            condition_tolerance: tolerances.condition.unwrap_or(tol::CONDITION),
            chain_tolerance: tolerances.chain.unwrap_or(tol::CHAIN),
        })
    }

    /// Fails with the first piece of data `theorem` needs that the input lacks.
    pub fn require(&self, theorem: Theorem) -> Result<()> {
        ensure!(self.x.is_some(), "vectors.x: required by {theorem}");
        if theorem != Theorem::Lemma21 || self.lemma.is_none() {
            ensure!(self.box_x.is_some(), "boxes.x: required by {theorem}");
        }
        if theorem.needs_y() {
            ensure!(self.y.is_some(), "vectors.y: required by {theorem}");
        }
        if theorem.needs_box_y() {
            ensure!(self.box_y.is_some(), "boxes.y: required by {theorem}");
        }
        if theorem.needs_lambda() {
            ensure!(self.lambda.is_some(), "lambda: required by {theorem}");
        }
        if theorem.is_integral() {
            ensure!(
                self.functions.is_some(),
                "space: {theorem} needs a quadrature space"
            );
        }
        Ok(())
    }
}

fn coordinate_family(
    spec: &FamilySpec,
    dim: usize,
    mode: Mode,
    gram: f64,
) -> Result<OrthonormalFamilyF64> {
    let family = match spec {
        FamilySpec::Canonical { indices } => OrthonormalFamilyF64::canonical(dim, indices, mode)
            .map_err(|e| anyhow!("family.canonical.indices: {e}"))?,
        FamilySpec::GramSchmidt { vectors, tolerance } => {
            let raw = vectors
                .iter()
                .enumerate()
                .map(|(i, v)| vector(v, &format!("family.gram_schmidt.vectors[{i}]"), dim, mode))
                .collect::<Result<Vec<_>>>()?;
            let gs = gram_schmidt(&raw, tolerance.unwrap_or(tol::GRAM))
                .map_err(|e| anyhow!("family.gram_schmidt: {e}"))?;
            ensure!(
                gs.dropped.is_empty(),
                "family.gram_schmidt.vectors: vectors {:?} are linearly dependent on earlier ones",
                gs.dropped
            );
            gs.family
        }
        FamilySpec::Explicit { vectors } => {
            let members = vectors
                .iter()
                .enumerate()
                .map(|(i, v)| vector(v, &format!("family.explicit.vectors[{i}]"), dim, mode))
                .collect::<Result<Vec<_>>>()?;
            OrthonormalFamilyF64::new(members, None, gram)
                .map_err(|e| anyhow!("family.explicit: {e}"))?
        }
        FamilySpec::Fourier { .. } | FamilySpec::Legendre { .. } => {
            bail!("family: function families need a quadrature space")
        }
    };
    Ok(family)
}

fn function_family(
    spec: &FamilySpec,
    space: &Arc<QuadratureSpaceF64>,
    gram: f64,
) -> Result<FunctionFamily<f64>> {
    let samples = |vectors: &[Vec<JsonScalar>], field: &str| -> Result<Vec<FunctionSampleF64>> {
        vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                FunctionSampleF64::new(space.clone(), complexify(v))
                    .map_err(|e| anyhow!("{field}[{i}]: {e}"))
            })
            .collect()
    };
    Ok(match spec {
        FamilySpec::Fourier { count } => build_family(FamilyKind::Fourier, *count, space)
            .map_err(|e| anyhow!("family.fourier: {e}"))?,
        FamilySpec::Legendre { count } => build_family(FamilyKind::Legendre, *count, space)
            .map_err(|e| anyhow!("family.legendre: {e}"))?,
        FamilySpec::GramSchmidt { vectors, .. } => {
            let fs = samples(vectors, "family.gram_schmidt.vectors")?;
            let n = fs.len();
            build_family(FamilyKind::Custom(fs), n, space)
                .map_err(|e| anyhow!("family.gram_schmidt: {e}"))?
        }
        FamilySpec::Explicit { vectors } => {
            let fs = samples(vectors, "family.explicit.vectors")?;
            let members = fs.iter().map(orthobound::embed).collect();
            let family = OrthonormalFamilyF64::new(members, None, gram)
                .map_err(|e| anyhow!("family.explicit: {e}"))?;
            FunctionFamily {
                samples: fs,
                family,
            }
        }
        FamilySpec::Canonical { .. } => bail!("family.canonical: needs a coordinate space"),
    })
}

fn quadrature_space(q: &QuadratureSpec, mode: Mode) -> Result<QuadratureSpaceF64> {
    let [a, b] = q.interval;
    let n = q.node_count;
    let space = match q.rule {
        Rule::Trapezoid => QuadratureSpace::trapezoid(a, b, n, mode)?,
        Rule::GaussLegendre => QuadratureSpace::gauss_legendre(a, b, n, mode)?,
        Rule::Table => {
            let nodes = q
                .nodes
                .clone()
                .ok_or_else(|| anyhow!("nodes: required by the table rule"))?;
            let weights = q
                .weights
                .clone()
                .ok_or_else(|| anyhow!("weights: required by the table rule"))?;
            ensure!(
                nodes.len() == n,
                "nodes: expected {n} entries, found {}",
                nodes.len()
            );
            QuadratureSpace::new((a, b), Rule::Table, nodes, weights, vec![1.0; n], mode)?
        }
    };
    if q.rule != Rule::Table {
        ensure!(
            q.nodes.is_none() && q.weights.is_none(),
            "nodes: only the table rule takes explicit nodes"
        );
    }
    Ok(match &q.density {
        None => space,
        Some(DensitySpec::Constant(c)) => space.with_density(|_| *c).context("density")?,
        Some(DensitySpec::Table(t)) => space.with_density_values(t.clone()).context("density")?,
    })
}

fn vector(values: &[JsonScalar], field: &str, dim: usize, mode: Mode) -> Result<VectorF64> {
    ensure!(
        values.len() == dim,
        "{field}: expected {dim} coordinates, found {}",
        values.len()
    );
    VectorF64::new(complexify(values), mode).map_err(|e| anyhow!("{field}: {e}"))
}

fn coordinate_vector(
    spec: Option<&VectorSpec>,
    field: &str,
    dim: usize,
    mode: Mode,
) -> Result<Option<VectorF64>> {
    match spec {
        None => Ok(None),
        Some(VectorSpec::Coordinates(v)) => vector(v, field, dim, mode).map(Some),
        Some(VectorSpec::Samples { .. }) => {
            bail!("{field}: function samples need a quadrature space")
        }
    }
}

fn sample(
    spec: Option<&VectorSpec>,
    field: &str,
    space: &Arc<QuadratureSpaceF64>,
) -> Result<Option<FunctionSampleF64>> {
    let values = match spec {
        None => return Ok(None),
        Some(VectorSpec::Coordinates(v)) => v,
        Some(VectorSpec::Samples { nodes, values }) => {
            if let Some(nodes) = nodes {
                ensure!(
                    nodes.len() == space.len(),
                    "{field}.nodes: expected {} nodes, found {}",
                    space.len(),
                    nodes.len()
                );
                let scale = space.nodes().iter().fold(1.0f64, |m, s| m.max(s.abs()));
                if let Some(k) = nodes
                    .iter()
                    .zip(space.nodes())
                    .position(|(a, b)| (a - b).abs() > 1e-12 * scale)
                {
                    bail!(
                        "{field}.nodes[{k}]: {} does not match rule node {}",
                        nodes[k],
                        space.nodes()[k]
                    );
                }
            }
            values
        }
    };
    FunctionSampleF64::new(space.clone(), complexify(values))
        .map(Some)
        .map_err(|e| anyhow!("{field}: {e}"))
}

fn boxed(
    spec: Option<&BoxSpec>,
    field: &str,
    family: &OrthonormalFamilyF64,
) -> Result<Option<BoxBoundsF64>> {
    let Some(spec) = spec else { return Ok(None) };
    let b = BoxBoundsF64::new(complexify(&spec.lower), complexify(&spec.upper))
        .map_err(|e| anyhow!("{field}: {e}"))?;
    ensure!(
        b.len() == family.len(),
        "{field}: expected {} bounds (one per family member), found {}",
        family.len(),
        b.len()
    );
    family
        .check_coefficients(b.lower(), "box lower")
        .and_then(|_| family.check_coefficients(b.upper(), "box upper"))
        .map_err(|e| anyhow!("{field}: {e}"))?;
    Ok(Some(b))
}
