use orthobound::{
    BoundReportF64, ConditionReportF64, PointwiseCheck, SharpnessResult, Theorem, Tighter,
};
use serde::Serialize;

use crate::problem::{ProblemDescription, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_CHAIN: i32 = 4;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "orthobound",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Serialize)]
pub struct VectorConditions {
    pub vector: String,
    pub re_form: ConditionReportF64,
    pub norm_form: ConditionReportF64,
    /// |re_form_value + norm_form_lhs² − norm_form_rhs²|.
    pub equivalence_residual: f64,
    pub forms_agree: bool,
}

#[derive(Debug, Serialize)]
pub struct ComparisonSection {
    pub b1: f64,
    pub b2: f64,
    pub tighter: Tighter,
}

#[derive(Debug, Serialize)]
pub struct Status {
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool: Tool,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<Theorem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<ProblemDescription>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<VectorConditions>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pointwise: Vec<NamedPointwise>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundReportF64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<SharpnessResult>,
    pub status: Status,
    /// Wall-clock seconds; only with `--timing`, since it breaks byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_seconds: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct NamedPointwise {
    pub vector: String,
    #[serde(flatten)]
    pub check: PointwiseCheck<f64>,
}

impl ReportDocument {
    pub fn new(command: &'static str) -> Self {
        Self {
            schema: SCHEMA,
            tool: TOOL,
            command,
            theorem: None,
            input: None,
            conditions: Vec::new(),
            pointwise: Vec::new(),
            bound: None,
            comparison: None,
            sharpness: None,
            status: Status {
                exit_code: EXIT_OK,
                message: None,
            },
            timing_seconds: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// One `theorem,term,value` row per chain term, 17 significant digits.
pub fn csv(
    theorem: Theorem,
    bound: &BoundReportF64,
    comparison: Option<&ComparisonSection>,
) -> String {
    let mut rows = vec![
        ("left_value", bound.left_value),
        ("refined_bound", bound.refined_bound),
        ("outer_bound", bound.outer_bound),
    ];
    if let Some(c) = comparison {
        rows.push(("b1", c.b1));
        rows.push(("b2", c.b2));
    }
    let mut out = String::from("theorem,term,value\n");
    for (term, value) in rows {
        out.push_str(&format!("{theorem},{term},{value:.16e}\n"));
    }
    out
}
