//! `orthobound`: check box conditions, evaluate bounds and probe sharpness.
//!
//! Exit codes: 0 success, 1 input error, 3 hypothesis unsatisfied,
//! 4 chain violation.

mod problem;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use orthobound::{
    check_norm_form, check_re_form, companion_abs, companion_bound, compare_b1_b2, gruess_v1,
    gruess_v2, integral_bessel, integral_gruess, lemma21_bound, pointwise_box_check, probe,
    BoundOptions, BoundReportF64, BoxBoundsF64, Error, FunctionSampleF64, Mode, ProbeConfig,
    Theorem, VectorF64,
};

use problem::{parse, Problem, ProblemDescription};
use report::{
    csv, ComparisonSection, NamedPointwise, ReportDocument, VectorConditions, EXIT_CHAIN,
    EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK,
};

#[derive(Parser, Debug)]
#[command(
    name = "orthobound",
    version,
    about = "Bessel- and Grüss-type bounds for finite orthonormal families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate both forms of the box condition for every vector with a box.
    Check {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate one bound and its full chain.
    Bound {
        input: PathBuf,
        #[arg(long)]
        theorem: Theorem,
        /// Report the chain even when a hypothesis fails.
        #[arg(long)]
        force: bool,
        /// Write the chain terms as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Search random feasible inputs for the largest left/outer ratio.
    Sharpness {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        family_size: usize,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        lambda: Option<f64>,
        /// Probe complex spaces instead of real ones.
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Condition tolerance; overrides the input document.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INPUT as u8
            } else {
                EXIT_OK as u8
            });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn run(command: Command) -> Result<i32> {
    let started = Instant::now();
    let (mut doc, common) = match command {
        Command::Check { input, common } => (cmd_check(&input, &common)?, common),
        Command::Bound {
            input,
            theorem,
            force,
            csv,
            common,
        } => (
            cmd_bound(&input, theorem, force, csv.as_deref(), &common)?,
            common,
        ),
        Command::Sharpness {
            theorem,
            dim,
            family_size,
            probes,
            seed,
            lambda,
            complex,
            common,
        } => {
            let mut config = ProbeConfig::new(theorem, dim, family_size, probes, seed)
                .with_mode(if complex { Mode::Complex } else { Mode::Real });
            config.lambda = lambda;
            (cmd_sharpness(&config)?, common)
        }
    };
    if common.timing {
        doc.timing_seconds = Some(started.elapsed().as_secs_f64());
    }
    emit(&doc.to_json()?, common.out.as_deref())?;
    Ok(doc.status.exit_code)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Path, common: &Common) -> Result<(ProblemDescription, Problem)> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let desc = parse(&text).with_context(|| format!("{}", input.display()))?;
    let mut problem = Problem::build(&desc).with_context(|| format!("{}", input.display()))?;
    if let Some(t) = common.tolerance {
        anyhow::ensure!(
            t.is_finite() && t >= 0.0,
            "--tolerance must be finite and nonnegative"
        );
        problem.condition_tolerance = t;
    }
    Ok((desc, problem))
}

fn conditions_for(
    name: &str,
    v: &VectorF64,
    b: &BoxBoundsF64,
    p: &Problem,
) -> Result<VectorConditions> {
    let re_form = check_re_form(v, &p.family, b, p.condition_tolerance)?;
    let norm_form = check_norm_form(v, &p.family, b, p.condition_tolerance)?;
    Ok(VectorConditions {
        vector: name.into(),
        equivalence_residual: re_form.identity_residual,
        forms_agree: re_form.satisfied == norm_form.satisfied,
        re_form,
        norm_form,
    })
}

fn pointwise_for(
    name: &str,
    f: &FunctionSampleF64,
    b: &BoxBoundsF64,
    p: &Problem,
) -> Result<Option<NamedPointwise>> {
    match &p.functions {
        Some(fam) if fam.space().mode() == Mode::Real => Ok(Some(NamedPointwise {
            vector: name.into(),
            check: pointwise_box_check(f, &fam.samples, b)?,
        })),
        _ => Ok(None),
    }
}

fn cmd_check(input: &Path, common: &Common) -> Result<ReportDocument> {
    let (desc, p) = load(input, common)?;
    let mut doc = ReportDocument::new("check");
    let pairs = [("x", &p.x, &p.box_x, &p.f), ("y", &p.y, &p.box_y, &p.g)];
    for (name, v, b, f) in pairs {
        if let (Some(v), Some(b)) = (v, b) {
            doc.conditions.push(conditions_for(name, v, b, &p)?);
            if let Some(f) = f {
                doc.pointwise.extend(pointwise_for(name, f, b, &p)?);
            }
        }
    }
    if doc.conditions.is_empty() {
        return Err(anyhow!(
            "{}: check needs vectors.x with boxes.x (or y with boxes.y)",
            input.display()
        ));
    }
    let failing: Vec<&str> = doc
        .conditions
        .iter()
        .filter(|c| !c.re_form.satisfied)
        .map(|c| c.vector.as_str())
        .collect();
    if !failing.is_empty() {
        doc.status.exit_code = EXIT_HYPOTHESIS;
        doc.status.message = Some(format!(
            "condition not satisfied for {}",
            failing.join(", ")
        ));
    }
    doc.input = Some(desc);
    Ok(doc)
}

fn evaluate(
    theorem: Theorem,
    p: &Problem,
    opts: &BoundOptions<f64>,
) -> orthobound::Result<(BoundReportF64, Option<ComparisonSection>)> {
    let (x, fam) = (p.x.as_ref().expect("required"), &p.family);
    let bx = || p.box_x.as_ref().expect("required");
    let y = || p.y.as_ref().expect("required");
    let by = || p.box_y.as_ref().expect("required");
    let lambda = || p.lambda.expect("required");
    let functions = || p.functions.as_ref().expect("required");
    let report = match theorem {
        Theorem::Lemma21 => match &p.lemma {
            Some((centers, r)) => lemma21_bound(x, fam, centers, *r, opts)?,
            None => lemma21_bound(x, fam, &bx().midpoints(), bx().radius(), opts)?,
        },
        Theorem::BesselB1 => orthobound::bessel_counterpart_b1(x, fam, bx(), opts)?,
        Theorem::BesselB2 => orthobound::bessel_counterpart_b2(x, fam, bx(), opts)?,
        Theorem::Compare => {
            let c = compare_b1_b2(x, fam, bx(), opts)?;
            let section = ComparisonSection {
                b1: c.b1,
                b2: c.b2,
                tighter: c.tighter,
            };
            return Ok((c.report, Some(section)));
        }
        Theorem::GruessV1 => gruess_v1(x, y(), fam, bx(), by(), opts)?,
        Theorem::GruessV2 => gruess_v2(x, y(), fam, bx(), by(), opts)?,
        Theorem::Companion => companion_bound(x, y(), fam, bx(), lambda(), opts)?,
        Theorem::CompanionAbs => companion_abs(x, y(), fam, bx(), lambda(), opts)?,
        Theorem::IntegralBessel => {
            integral_bessel(p.f.as_ref().expect("required"), functions(), bx(), opts)?
        }
        Theorem::IntegralGruess => integral_gruess(
            p.f.as_ref().expect("required"),
            p.g.as_ref().expect("required"),
            functions(),
            bx(),
            by(),
            opts,
        )?,
    };
    Ok((report, None))
}

fn cmd_bound(
    input: &Path,
    theorem: Theorem,
    force: bool,
    csv_path: Option<&Path>,
    common: &Common,
) -> Result<ReportDocument> {
    let (desc, p) = load(input, common)?;
    p.require(theorem)
        .with_context(|| format!("{}", input.display()))?;
    let opts = BoundOptions {
        condition_tolerance: p.condition_tolerance,
        chain_tolerance: p.chain_tolerance,
        force,
    };
    let mut doc = ReportDocument::new("bound");
    doc.theorem = Some(theorem);
    if let (Some(x), Some(b)) = (&p.x, &p.box_x) {
        doc.conditions.push(conditions_for("x", x, b, &p)?);
    }
    if let (Some(y), Some(b)) = (&p.y, &p.box_y) {
        doc.conditions.push(conditions_for("y", y, b, &p)?);
    }
    match evaluate(theorem, &p, &opts) {
        Ok((bound, comparison)) => {
            if !bound.hypotheses_satisfied {
                doc.status.exit_code = EXIT_HYPOTHESIS;
                doc.status.message =
                    Some("hypothesis not satisfied; chain reported under --force".into());
            } else if !bound.chain_ok {
                doc.status.exit_code = EXIT_CHAIN;
                doc.status.message = Some("chain violated on a satisfied hypothesis".into());
            }
            if let Some(path) = csv_path {
                fs::write(path, csv(theorem, &bound, comparison.as_ref()))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            doc.bound = Some(bound);
            doc.comparison = comparison;
        }
        Err(e @ Error::Hypothesis { .. }) => {
            doc.status.exit_code = EXIT_HYPOTHESIS;
            doc.status.message = Some(format!(
                "{e}; rerun with --force to report the chain anyway"
            ));
        }
        Err(e) => return Err(anyhow!(e).context(format!("{}", input.display()))),
    }
    doc.input = Some(desc);
    Ok(doc)
}

fn cmd_sharpness(config: &ProbeConfig) -> Result<ReportDocument> {
    if config.lambda.is_some() && !config.theorem.needs_lambda() {
        return Err(anyhow!(
            "--lambda applies only to companion and companion_abs"
        ));
    }
    let result = probe(config)?;
    let mut doc = ReportDocument::new("sharpness");
    doc.theorem = Some(config.theorem);
    if result.violations > 0 || result.chain_violations > 0 {
        doc.status.exit_code = EXIT_CHAIN;
        doc.status.message = Some(format!(
            "{} probes exceeded the outer bound, {} broke the chain",
            result.violations, result.chain_violations
        ));
    }
    doc.sharpness = Some(result);
    Ok(doc)
}
