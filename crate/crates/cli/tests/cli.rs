use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthobound"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin().args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        out.status.code().unwrap(),
        json,
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn witness_check_is_boundary_satisfied() {
    let (code, doc, _) = run(&["check", path_str(&data("witness.json"))]);
    assert_eq!(code, 0);
    assert_eq!(doc["schema"], "orthobound/1");
    let x = &doc["conditions"][0];
    assert!(num(&x["re_form"]["re_form_value"]).abs() < 1e-12);
    assert_eq!(x["forms_agree"], true);
    assert!(num(&x["equivalence_residual"]) < 1e-12);
}

#[test]
fn midpoint_check_passes_and_out_of_ball_fails() {
    let (code, doc, _) = run(&["check", path_str(&data("midpoint.json"))]);
    assert_eq!(code, 0);
    assert!((num(&doc["conditions"][0]["re_form"]["re_form_value"]) - 2.5).abs() < 1e-12);
    let (code, doc, _) = run(&["check", path_str(&data("out_of_ball.json"))]);
    assert_eq!(code, 3);
    assert_eq!(doc["conditions"][0]["re_form"]["satisfied"], false);
    assert_eq!(doc["status"]["exit_code"], 3);
}

#[test]
fn compare_reproduces_remark_values() {
    let (code, doc, _) = run(&[
        "bound",
        path_str(&data("remark_k05.json")),
        "--theorem",
        "compare",
    ]);
    assert_eq!(code, 0);
    assert!((num(&doc["comparison"]["b1"]) - 0.25).abs() < 1e-12);
    assert!((num(&doc["comparison"]["b2"]) - 0.75).abs() < 1e-12);
    assert_eq!(doc["comparison"]["tighter"], "B1");
    assert_eq!(doc["bound"]["chain_ok"], true);
}

#[test]
fn every_coordinate_tag_on_the_witness_reaches_the_outer_bound() {
    for tag in [
        "bessel_b2",
        "gruess_v1",
        "gruess_v2",
        "companion",
        "companion_abs",
        "lemma21",
    ] {
        let (code, doc, err) = run(&["bound", path_str(&data("witness.json")), "--theorem", tag]);
        assert_eq!(code, 0, "{tag}: {err}");
        let b = &doc["bound"];
        assert!(
            (num(&b["left_value"]) - num(&b["outer_bound"])).abs() < 1e-9,
            "{tag}"
        );
        assert_eq!(b["theorem"], tag);
    }
}

#[test]
fn companion_without_lambda_is_an_input_error() {
    let (code, doc, err) = run(&[
        "bound",
        path_str(&data("companion_no_lambda.json")),
        "--theorem",
        "companion",
    ]);
    assert_eq!(code, 1);
    assert!(doc.is_null());
    assert!(err.contains("lambda"), "{err}");
}

#[test]
fn hypothesis_failure_and_force() {
    let input = data("out_of_ball.json");
    let (code, doc, _) = run(&["bound", path_str(&input), "--theorem", "bessel_b2"]);
    assert_eq!(code, 3);
    assert!(doc.get("bound").is_none());
    assert!(doc["status"]["message"]
        .as_str()
        .unwrap()
        .contains("--force"));
    let (code, doc, _) = run(&[
        "bound",
        path_str(&input),
        "--theorem",
        "bessel_b2",
        "--force",
    ]);
    assert_eq!(code, 3);
    assert_eq!(doc["bound"]["forced"], true);
    assert_eq!(doc["bound"]["hypotheses_satisfied"], false);
}

#[test]
fn malformed_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            json!({"schema": "orthobound/1", "mode": "real", "space": {"coordinates": {"dimension": "two"}}, "family": {"canonical": {"indices": [0]}}}),
            "space.coordinates.dimension",
        ),
        (
            json!({"schema": "orthobound/1", "mode": "sideways", "space": {"coordinates": {"dimension": 2}}, "family": {"canonical": {"indices": [0]}}}),
            "mode",
        ),
        (
            json!({"schema": "orthobound/2", "mode": "real", "space": {"coordinates": {"dimension": 2}}, "family": {"canonical": {"indices": [0]}}}),
            "schema",
        ),
        (
            json!({"schema": "orthobound/1", "mode": "real", "space": {"coordinates": {"dimension": 2}}, "family": {"canonical": {"indices": [0]}}, "boxes": {"x": {"lower": [0, 0], "upper": [1, 1]}}}),
            "boxes.x",
        ),
        (
            json!({"schema": "orthobound/1", "mode": "real", "space": {"coordinates": {"dimension": 2}}, "family": {"canonical": {"indices": [0]}}, "vectors": {"x": [[1, 2], 0]}}),
            "vectors.x",
        ),
        (
            json!({"schema": "orthobound/1", "mode": "real", "space": {"coordinates": {"dimension": 2}}, "family": {"explicit": {"vectors": [[1, 0], [1, 1]]}}}),
            "family.explicit",
        ),
        (
            json!({"schema": "orthobound/1", "mode": "real", "space": {"coordinates": {"dimension": 2}}, "family": {"canonical": {"indices": [0]}}, "extra": 1}),
            "extra",
        ),
    ];
    for (i, (doc, field)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.json"));
        fs::write(&p, doc.to_string()).unwrap();
        let (code, _, err) = run(&["check", path_str(&p)]);
        assert_eq!(code, 1, "{field}");
        assert!(err.contains(field), "{field}: {err}");
    }
    let p = dir.path().join("syntax.json");
    fs::write(&p, "{\"schema\": ").unwrap();
    let (code, _, err) = run(&["check", path_str(&p)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
    let (code, _, _) = run(&["check", "/nonexistent/input.json"]);
    assert_eq!(code, 1);
}

fn fourier_doc(n: usize) -> Value {
    let nodes: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let f: Vec<f64> = nodes
        .iter()
        .map(|s| 0.3 + 0.2 * s.cos() + 0.1 * (2.0 * s).sin())
        .collect();
    let g: Vec<f64> = nodes.iter().map(|s| 1.0 - 0.4 * s.sin()).collect();
    let c = (2.0 * PI).sqrt();
    json!({
        "schema": "orthobound/1",
        "mode": "real",
        "space": {"quadrature": {"interval": [0.0, 2.0 * PI], "rule": "trapezoid", "node_count": n}},
        "family": {"fourier": {"count": 1}},
        "vectors": {"x": {"nodes": nodes, "values": f}, "y": {"values": g}},
        "boxes": {"x": {"lower": [0.0], "upper": [0.6 * c]}, "y": {"lower": [0.6 * c], "upper": [1.4 * c]}}
    })
}

#[test]
fn fourier_input_drives_integral_bounds_and_pointwise_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fourier.json");
    fs::write(&p, fourier_doc(128).to_string()).unwrap();
    let (code, doc, err) = run(&["check", path_str(&p)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(doc["pointwise"][0]["holds"], true);
    assert_eq!(doc["pointwise"][1]["holds"], true);
    for tag in ["integral_bessel", "integral_gruess"] {
        let (code, doc, err) = run(&["bound", path_str(&p), "--theorem", tag]);
        assert_eq!(code, 0, "{tag}: {err}");
        assert_eq!(doc["bound"]["chain_ok"], true);
        assert_eq!(doc["bound"]["theorem"], tag);
    }
    // ∫ f² − |∫ f/√(2π)|² = π(0.04 + 0.01) for the sampled trigonometric f
    let (_, doc, _) = run(&["bound", path_str(&p), "--theorem", "integral_bessel"]);
    assert!((num(&doc["bound"]["left_value"]) - PI * 0.05).abs() < 1e-12);
}

#[test]
fn mismatched_nodes_are_rejected() {
    let mut doc = fourier_doc(64);
    doc["vectors"]["x"]["nodes"][3] = json!(99.0);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    fs::write(&p, doc.to_string()).unwrap();
    let (code, _, err) = run(&["check", path_str(&p)]);
    assert_eq!(code, 1);
    assert!(err.contains("vectors.x.nodes[3]"), "{err}");
}

#[test]
fn echo_reparses_to_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = [data("witness.json"), data("midpoint.json"), {
        let p = dir.path().join("fourier.json");
        fs::write(&p, fourier_doc(96).to_string()).unwrap();
        p
    }];
    for (i, input) in inputs.iter().enumerate() {
        let tag = if i == 2 {
            "integral_bessel"
        } else {
            "bessel_b1"
        };
        let (_, first, _) = run(&["bound", path_str(input), "--theorem", tag]);
        let echo = dir.path().join(format!("echo{i}.json"));
        fs::write(&echo, first["input"].to_string()).unwrap();
        let (_, second, _) = run(&["bound", path_str(&echo), "--theorem", tag]);
        assert_eq!(first["input"], second["input"]);
        assert_eq!(first["bound"], second["bound"]);
        assert_eq!(first["conditions"], second["conditions"]);
    }
}

#[test]
fn csv_has_one_row_per_chain_term_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    let (code, doc, _) = run(&[
        "bound",
        path_str(&data("remark_k05.json")),
        "--theorem",
        "compare",
        "--csv",
        path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theorem,term,value");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let parts: Vec<&str> = line.split(',').collect();
        assert_eq!(parts[0], "compare");
        let mantissa = parts[2].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(
            mantissa.chars().filter(char::is_ascii_digit).count(),
            17,
            "{line}"
        );
    }
    let left: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(left, num(&doc["bound"]["left_value"]));
}

#[test]
fn out_flag_writes_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (_, stdout_doc, _) = run(&[
        "bound",
        path_str(&data("witness.json")),
        "--theorem",
        "gruess_v2",
    ]);
    let o = bin()
        .args([
            "bound",
            path_str(&data("witness.json")),
            "--theorem",
            "gruess_v2",
            "--out",
            path_str(&out),
        ])
        .output()
        .unwrap();
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, stdout_doc);
}

#[test]
fn tolerance_flag_overrides_input() {
    let (_, doc, _) = run(&[
        "check",
        path_str(&data("witness.json")),
        "--tolerance",
        "1e-6",
    ]);
    assert_eq!(
        num(&doc["conditions"][0]["re_form"]["tolerance_used"]),
        1e-6
    );
    let (code, _, _) = run(&[
        "check",
        path_str(&data("witness.json")),
        "--tolerance",
        "-1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn sharpness_command() {
    let (code, doc, _) = run(&[
        "sharpness",
        "--theorem",
        "bessel_b2",
        "--dim",
        "2",
        "--family-size",
        "1",
        "--probes",
        "10000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    let s = &doc["sharpness"];
    assert!(num(&s["best_ratio"]) >= 0.999);
    assert!(num(&s["best_ratio"]) <= 1.0 + 1e-9);
    assert_eq!(s["probes"], 10000);
    assert!(s["witness"].is_object());

    let (code, doc, _) = run(&[
        "sharpness",
        "--theorem",
        "companion",
        "--lambda",
        "0.5",
        "--probes",
        "500",
    ]);
    assert_eq!(code, 0);
    assert!((num(&doc["sharpness"]["best_ratio"]) - 1.0).abs() < 1e-9);

    let (code, doc, _) = run(&[
        "sharpness",
        "--theorem",
        "gruess_v2",
        "--dim",
        "4",
        "--family-size",
        "2",
        "--probes",
        "2000",
        "--complex",
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["sharpness"]["mode"], "complex");
    assert!(num(&doc["sharpness"]["best_ratio"]) <= 1.0 + 1e-9);
}

#[test]
fn sharpness_parameter_errors() {
    for args in [
        vec!["sharpness", "--theorem", "bessel_b2", "--probes", "0"],
        vec![
            "sharpness",
            "--theorem",
            "bessel_b2",
            "--dim",
            "2",
            "--family-size",
            "3",
        ],
        vec!["sharpness", "--theorem", "companion", "--lambda", "1.0"],
        vec!["sharpness", "--theorem", "bessel_b2", "--lambda", "0.3"],
        vec!["sharpness", "--theorem", "nonsense"],
        vec!["sharpness"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn timing_is_opt_in() {
    let (_, plain, _) = run(&["check", path_str(&data("witness.json"))]);
    assert!(plain.get("timing_seconds").is_none());
    let (_, timed, _) = run(&["check", path_str(&data("witness.json")), "--timing"]);
    assert!(num(&timed["timing_seconds"]) >= 0.0);
}
