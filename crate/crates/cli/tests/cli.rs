use std::path::PathBuf;
use std::process::{Command, Output};

use froelicher::oracle::fn_extract;
use froelicher::{default_connection, Target};
use froelicher_cli::{parse_form, parse_spec, read_spec, CliError};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn froelicher(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_froelicher"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Drops the `# ...` header lines of a command's output.
fn body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

const FAILING_JACOBI: &str = r#"{
  "algebroid": {
    "n": 0, "r": 3, "anchor": [[], [], []],
    "structure": [
      {"a": 1, "b": 2, "c": 3, "value": [{"coeff": "1", "exps": []}]},
      {"a": 1, "b": 3, "c": 1, "value": [{"coeff": "1", "exps": []}]}
    ]
  }
}"#;

#[test]
fn shipped_so3_fixture_loads_and_validates() {
    let spec = read_spec(&fixture("so3.spec"), true).unwrap();
    assert_eq!(spec.algebroid.rank(), 3);
    assert_eq!(spec.algebroid.nvars(), 0);
    assert!(spec.validation.passes());
    assert_eq!(*spec.algebroid, froelicher::Algebroid::so3());
    let sym0 = spec.connection("sym0").unwrap();
    assert_eq!(*sym0, default_connection(spec.algebroid.clone()));
    assert!(!spec.connection("zero").unwrap().is_torsion_free());
}

#[test]
fn structure_index_beyond_rank_names_the_record() {
    let text = r#"{"algebroid": {"n": 0, "r": 2, "anchor": [[], []],
        "structure": [{"a": 1, "b": 2, "c": 3, "value": [{"coeff": "1", "exps": []}]}]}}"#;
    let err = parse_spec(text, true).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, CliError::Record { .. }), "{msg}");
    assert!(msg.contains("algebroid.structure[1]"), "{msg}");
    assert!(msg.contains("c index 3"), "{msg}");
}

#[test]
fn zero_denominator_is_a_parse_error() {
    let text = r#"{"algebroid": {"n": 0, "r": 1, "anchor": [[]]},
        "forms": [{"name": "f", "degree": 0, "target": "scalar",
                   "components": [{"index": [], "value": [[{"coeff": "1/0", "exps": []}]]}]}]}"#;
    let msg = parse_spec(text, true).unwrap_err().to_string();
    assert!(msg.contains("form \"f\""), "{msg}");
    assert!(msg.contains("1/0"), "{msg}");
}

#[test]
fn syntax_errors_report_line_and_column() {
    let text = "{\n  \"algebroid\": {\n    \"n\": 0,\n    \"r\": 1 \"anchor\": [[]]\n  }\n}";
    match parse_spec(text, true).unwrap_err() {
        CliError::Syntax { line, column, .. } => {
            assert_eq!(line, 4);
            assert!(column > 0);
        }
        other => panic!("expected a syntax error, got {other}"),
    }
}

#[test]
fn float_literals_are_rejected() {
    let text = r#"{"algebroid": {"n": 0, "r": 1, "anchor": [[]]},
        "forms": [{"name": "f", "degree": 0, "target": "scalar",
                   "components": [{"index": [], "value": [[{"coeff": "0.5", "exps": []}]]}]}]}"#;
    assert!(parse_spec(text, true).is_err());
}

#[test]
fn dimension_errors_in_forms_and_connections() {
    let base = |extra: &str| {
        format!(r#"{{"algebroid": {{"n": 0, "r": 2, "anchor": [[], []]}}, {extra}}}"#)
    };
    let bad_index = base(
        r#""forms": [{"name": "w", "degree": 2, "target": "scalar",
            "components": [{"index": [2, 1], "value": [[]]}]}]"#,
    );
    let msg = parse_spec(&bad_index, true).unwrap_err().to_string();
    assert!(
        msg.contains("form \"w\"") && msg.contains("increasing"),
        "{msg}"
    );

    let bad_fiber = base(
        r#""forms": [{"name": "v", "degree": 0, "target": "A",
            "components": [{"index": [], "value": [[]]}]}]"#,
    );
    let msg = parse_spec(&bad_fiber, true).unwrap_err().to_string();
    assert!(
        msg.contains("form \"v\"") && msg.contains("fiber rank 2"),
        "{msg}"
    );

    let bad_conn = base(
        r#""connections": [{"name": "g", "bundle": {"rank": 1},
            "christoffel": [{"a": 1, "alpha": 2, "beta": 1, "value": []}]}]"#,
    );
    let msg = parse_spec(&bad_conn, true).unwrap_err().to_string();
    assert!(
        msg.contains("connection \"g\"") && msg.contains("alpha index 2"),
        "{msg}"
    );

    let dup = base(r#""bundles": [{"name": "E", "rank": 1}, {"name": "E", "rank": 2}]"#);
    assert!(parse_spec(&dup, true)
        .unwrap_err()
        .to_string()
        .contains("duplicate"));
}

#[test]
fn jacobi_failure_carries_the_witness_triple() {
    let msg = parse_spec(FAILING_JACOBI, true).unwrap_err().to_string();
    assert!(msg.contains("(e1, e2, e3)"), "{msg}");
    let spec = parse_spec(FAILING_JACOBI, false).unwrap();
    assert!(!spec.validation.jacobi_ok());
}

#[test]
fn check_reports_failure_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spec");
    std::fs::write(&path, FAILING_JACOBI).unwrap();
    let out = froelicher(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.starts_with("jacobi: fail, anchor-morphism: pass"),
        "{text}"
    );
    assert!(text.contains("jacobi witness: (e1, e2, e3)"), "{text}");

    let out = froelicher(&["eval", path.to_str().unwrap(), "--form", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Jacobi identity fails"));
    let out = froelicher(&[
        "eval",
        path.to_str().unwrap(),
        "--form",
        "x",
        "--skip-validate",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown form \"x\""));
}

#[test]
fn check_on_so3_passes() {
    let out = froelicher(&["check", fixture("so3.spec").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "jacobi: pass, anchor-morphism: pass\n");
}

#[test]
fn fn_command_matches_the_extraction_oracle() {
    let path = fixture("so3.spec");
    let spec = read_spec(&path, true).unwrap();
    let out = froelicher(&[
        "fn",
        path.to_str().unwrap(),
        "--phi",
        "J",
        "--psi",
        "J",
        "--connection",
        "sym0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# connection: sym0\n"));
    let printed = parse_form(&body(&text), &spec.algebroid).unwrap();
    let j = spec.form("J").unwrap();
    let oracle = fn_extract(spec.connection("sym0").unwrap(), j, j).unwrap();
    assert_eq!(printed, oracle);
    assert_eq!(printed.degree(), 2);
    assert_eq!(printed.target(), Target::Algebroid);
    assert!(!printed.is_zero());
}

#[test]
fn fn_without_connection_says_so() {
    let out = froelicher(&[
        "fn",
        fixture("so3.spec").to_str().unwrap(),
        "--phi",
        "X",
        "--psi",
        "Y",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().contains("symmetrize(zero)"));
    let spec = read_spec(&fixture("so3.spec"), true).unwrap();
    let v = parse_form(&body(&text), &spec.algebroid).unwrap();
    assert_eq!(v.value(&[]), spec.algebroid.basis(2));
}

#[test]
fn torsionful_connection_is_refused() {
    let out = froelicher(&[
        "fn",
        fixture("so3.spec").to_str().unwrap(),
        "--phi",
        "J",
        "--psi",
        "J",
        "--connection",
        "zero",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("nonzero torsion"), "{err}");
}

#[test]
fn nijenhuis_of_identity_is_zero() {
    let out = froelicher(&[
        "nijenhuis",
        fixture("so3.spec").to_str().unwrap(),
        "--n",
        "id",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec = read_spec(&fixture("so3.spec"), true).unwrap();
    assert!(parse_form(&body(&stdout(&out)), &spec.algebroid)
        .unwrap()
        .is_zero());
}

#[test]
fn deform_reports_and_exits_by_validity() {
    let out = froelicher(&["deform", fixture("so3.spec").to_str().unwrap(), "--n", "id"]);
    assert_eq!(out.status.code(), Some(0));
    let reparsed =
        parse_spec(&format!("{{\"algebroid\": {}}}", body(&stdout(&out))), true).unwrap();
    assert_eq!(*reparsed.algebroid, froelicher::Algebroid::so3());

    let out = froelicher(&[
        "deform",
        fixture("aff1_action.spec").to_str().unwrap(),
        "--n",
        "N",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("# jacobi: pass, anchor-morphism: fail"));
}

#[test]
fn eval_on_frame_elements() {
    let path = fixture("so3.spec");
    let out = froelicher(&["eval", path.to_str().unwrap(), "--form", "J", "--args", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        v,
        serde_json::json!([[{"coeff": "-1", "exps": []}], [], []])
    );

    let out = froelicher(&["eval", path.to_str().unwrap(), "--form", "J", "--args", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn verify_main_on_so3() {
    let out = froelicher(&[
        "verify",
        fixture("so3.spec").to_str().unwrap(),
        "--suite",
        "main",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("suite=main seed=7 "));
    assert!(text.contains(" fail=0 rejected=0\n"));
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let spec = fixture("aff1_action.spec");
    let args = [
        "verify",
        spec.to_str().unwrap(),
        "--suite",
        "covcov",
        "--seed",
        "3",
    ];
    let a = froelicher(&args);
    let b = froelicher(&args);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let mut with_output = args.to_vec();
    with_output.extend(["--output", path.to_str().unwrap()]);
    let c = froelicher(&with_output);
    assert_eq!(c.status.code(), a.status.code());
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn missing_file_and_unknown_names() {
    let out = froelicher(&["check", "/nonexistent/x.spec"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
    let out = froelicher(&[
        "fn",
        fixture("so3.spec").to_str().unwrap(),
        "--phi",
        "K",
        "--psi",
        "J",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown form \"K\""));
    let out = froelicher(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
