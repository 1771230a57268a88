use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chebycert::{Rational, Scalar};
use chebycert_cli::report::{parse_num, Report};
use serde_json::json;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn chebycert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebycert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_report(args: &[&str], out: &Path) -> (i32, Report) {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap()]);
    let output = chebycert(&full);
    let code = output.status.code().unwrap();
    assert!(
        code != 1,
        "unexpected error: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: Report = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    (code, report)
}

const CUBE: &str = "-1:1;1001;uniform;x1^3";

#[test]
fn cube_verify_passes_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, report) = run_report(&["verify", "--grid", CUBE, "--degree", "2"], &out);
    assert_eq!(code, 0);
    let psi: f64 = parse_num(&report.psi).unwrap();
    assert!((psi - 0.25).abs() < 1e-9);
    let cert = report.certificate.expect("certificate present");
    assert!(report.witness.is_none());
    assert!(cert.revalidate(&1e-8).unwrap());
    assert_eq!(report.extremes.plus, vec![250, 1000]);
    assert_eq!(report.extremes.minus, vec![0, 750]);
    assert_eq!(report.extremes.alternations, Some(4));
}

#[test]
fn perturbed_coefficients_fail_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.json");
    std::fs::write(
        &coeffs,
        json!({"degree": 2, "coefficients": [0.01, 0.75, 0.0]}).to_string(),
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let (code, report) = run_report(
        &[
            "verify",
            "--grid",
            CUBE,
            "--degree",
            "2",
            "--coeffs",
            coeffs.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(code, 2);
    assert!(report.certificate.is_none());
    let w = report.witness.expect("witness present");
    assert_eq!(w.coefficients.len(), 3);
}

#[test]
fn coefficients_by_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.json");
    std::fs::write(
        &coeffs,
        json!({"exponents": [[1]], "coefficients": ["3/4"]}).to_string(),
    )
    .unwrap();
    let out = dir.path().join("r.json");
    let (code, report) = run_report(
        &[
            "verify",
            "--grid",
            "-1:1;5;uniform;x1^3",
            "--degree",
            "2",
            "--exact",
            "--coeffs",
            coeffs.to_str().unwrap(),
        ],
        &out,
    );
    assert_eq!(code, 0);
    assert_eq!(report.psi, json!("1/4"));
}

#[test]
fn errors_exit_with_one() {
    let out = chebycert(&[
        "verify",
        "--input",
        "/nonexistent/data.csv",
        "--degree",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/data.csv"));

    let out = chebycert(&["fit", "--grid", "-1:1;5;uniform;x1 +", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));

    let out = chebycert(&["reduce", "--grid", CUBE, "--degree", "0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = chebycert(&["fit", "--grid", CUBE, "--degree", "1", "--rel-tol", "0.7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = [
        "report",
        "--grid",
        "-1:1;41;uniform;abs(x1)",
        "--degree",
        "2",
    ];
    let (ca, mut ra) = run_report(&args, &a);
    let (cb, mut rb) = run_report(&args, &b);
    assert_eq!(ca, cb);
    ra.timings.clear();
    rb.timings.clear();
    assert_eq!(ra, rb);
}

#[test]
fn xy_fixture_exact_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let input = fixture("xy_corners.csv");
    let (code, report) = run_report(
        &[
            "report",
            "--input",
            input.to_str().unwrap(),
            "--degree",
            "1",
            "--exact",
        ],
        &out,
    );
    assert_eq!(code, 0);
    assert_eq!(report.psi, json!("1"));
    assert_eq!(report.model.coefficients, vec![json!("0"); 3]);
    assert_eq!(report.extremes.plus, vec![0, 3]);
    assert_eq!(report.extremes.minus, vec![1, 2]);
    let cert = report.certificate.clone().unwrap();
    let weights: Vec<_> = cert
        .plus
        .iter()
        .chain(&cert.minus)
        .map(|w| w.weight.clone())
        .collect();
    assert_eq!(weights, vec![json!("1/2"); 4]);
    assert!(cert.revalidate(&Rational::from_i64(0)).unwrap());
    let reduction = report.reduction.unwrap();
    assert_eq!(reduction.traces.len(), 1);
    assert!(reduction.traces[0].steps.is_empty());
    assert_eq!(report.alternation.unwrap().planes_checked, 0);
}

#[test]
fn reduce_and_alternate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let input = fixture("square.csv");
    let (code, report) = run_report(
        &[
            "reduce",
            "--input",
            input.to_str().unwrap(),
            "--degree",
            "1",
        ],
        &out,
    );
    assert_eq!(code, 0);
    assert!(report.certificate.is_none());

    let (code, report) = run_report(
        &[
            "reduce",
            "--grid",
            "-1:1;5;uniform;x1^3",
            "--degree",
            "2",
            "--strategy",
            "single",
            "--variant",
            "max",
            "--exact",
        ],
        &out,
    );
    assert_eq!(code, 0);
    let red = report.reduction.unwrap();
    assert_eq!(red.strategy, "single-max");
    let step = &red.traces[0].steps[0];
    assert_eq!(step.coordinate, "x1");
    assert_eq!(step.delta, json!("-1"));
    assert_eq!(step.removed, vec![4]);

    let (code, report) = run_report(
        &[
            "alternate",
            "--grid",
            "-1:1;5;uniform;x1^3",
            "--degree",
            "2",
        ],
        &out,
    );
    assert_eq!(code, 0);
    assert_eq!(report.alternation.unwrap().planes_checked, 4);

    let (code, report) = run_report(
        &["fit", "--grid", "-1:1;5;uniform;x1^3", "--degree", "2"],
        &out,
    );
    assert_eq!(code, 0);
    assert!(report.verdict.is_none());
}

#[test]
fn report_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (_, report) = run_report(
        &[
            "verify",
            "--grid",
            "-1:1,-1:1;5;uniform;x1^2*x2 + x2^3",
            "--degree",
            "2",
        ],
        &out,
    );
    let text = serde_json::to_string(&report).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    if let Some(cert) = back.certificate {
        assert!(cert.revalidate(&1e-8).unwrap());
    }

    // the report itself is accepted as a coefficient file
    let again = dir.path().join("again.json");
    let (code, second) = run_report(
        &[
            "verify",
            "--grid",
            "-1:1,-1:1;5;uniform;x1^2*x2 + x2^3",
            "--degree",
            "2",
            "--coeffs",
            out.to_str().unwrap(),
        ],
        &again,
    );
    assert_eq!(code, 0);
    assert_eq!(second.model, report.model);
}
