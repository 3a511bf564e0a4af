use thiserror::Error;

use crate::space::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {what}: expected {expected}, got {actual}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("mode mismatch in {what}: expected {expected:?}, got {actual:?}")]
    ModeMismatch {
        what: &'static str,
        expected: Mode,
        actual: Mode,
    },

    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("vectors must have dimension at least 1")]
    ZeroDimension,

    #[error("{what} has a nonzero imaginary part in a real-mode space")]
    ComplexInRealMode { what: &'static str },

    #[error("family has {size} members but the space has dimension {dim}")]
    FamilyTooLarge { size: usize, dim: usize },

    #[error(
        "family is not orthonormal: |<e_{i}, e_{j}> - delta| = {deviation:e} exceeds {tolerance:e}"
    )]
    NotOrthonormal {
        i: usize,
        j: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("every input vector is linearly dependent; the family would be empty")]
    EmptyFamily,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis {which} not satisfied (excess {excess:e})")]
    Hypothesis { which: String, excess: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("dependence error: {requested} functions requested, only {independent} independent")]
    Dependence {
        requested: usize,
        independent: usize,
    },

    #[error("{0} requires a real-mode space")]
    RealModeOnly(&'static str),

    #[error("samples belong to different quadrature spaces")]
    SpaceMismatch,

    #[error("unsupported theorem tag for this operation: {0}")]
    UnsupportedTag(String),
}
