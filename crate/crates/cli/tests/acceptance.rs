use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use froelicher::random::FormSampler;
use froelicher::{fn_bracket, Algebroid, Target};
use froelicher_cli::spec::{form_record, to_json};
use froelicher_cli::{parse_form, parse_spec, SpecFile};
use rand::Rng;

const SPECS: u64 = 100;

fn random_spec(seed: u64) -> SpecFile {
    let zoo = Algebroid::zoo();
    let pick = (seed as usize) % zoo.len();
    let algebroid = Arc::new(zoo[pick].1.clone());
    let mut s = FormSampler::new(&algebroid, seed);
    let nbundles = s.rng().gen_range(0..=2);
    let bundles: Vec<(String, usize)> = (0..nbundles)
        .map(|i| (format!("E{i}"), s.rng().gen_range(1..=2)))
        .collect();
    let mut targets = vec![Target::Scalar, Target::Algebroid];
    targets.extend(bundles.iter().map(|(_, m)| Target::bundle(*m).unwrap()));
    let nconn = s.rng().gen_range(0..=3);
    let connections = (0..nconn)
        .map(|i| {
            let t = targets[s.rng().gen_range(0..targets.len())];
            (format!("c{i}"), s.connection(algebroid.clone(), t))
        })
        .collect();
    let nforms = s.rng().gen_range(0..=4);
    let forms = (0..nforms)
        .map(|i| {
            let t = targets[s.rng().gen_range(0..targets.len())];
            let degree = s.rng().gen_range(0..=algebroid.rank());
            (format!("f{i}"), s.form(degree, t))
        })
        .collect();
    SpecFile {
        validation: algebroid.validate(),
        algebroid,
        bundles,
        connections,
        forms,
    }
}

fn round_trip() -> Result<String, String> {
    let mut forms_checked = 0;
    for seed in 0..SPECS {
        let spec = random_spec(seed);
        let text = spec.to_json();
        let back =
            parse_spec(&text, true).map_err(|e| format!("seed {seed}: reparse failed: {e}"))?;
        if back != spec {
            return Err(format!(
                "seed {seed}: parsed spec differs from the printed one"
            ));
        }
        if back.to_json() != text {
            return Err(format!("seed {seed}: second print is not byte-identical"));
        }
        let mut s = FormSampler::new(&spec.algebroid, seed ^ 0xabcd);
        let conn = s.torsion_free(spec.algebroid.clone());
        let (k, l) = ((seed % 3) as usize, (seed / 3 % 3) as usize);
        let phi = s.form(k, Target::Algebroid);
        let psi = s.form(l, Target::Algebroid);
        let computed = fn_bracket(&conn, &phi, &psi).map_err(|e| e.to_string())?;
        let printed = to_json(&form_record("K", &computed));
        let reparsed =
            parse_form(&printed, &spec.algebroid).map_err(|e| format!("seed {seed}: {e}"))?;
        if reparsed != computed {
            return Err(format!(
                "seed {seed}: computed bracket does not survive print/parse"
            ));
        }
        forms_checked += 1;
    }
    Ok(format!(
        "{SPECS} specs and {forms_checked} computed brackets round-trip"
    ))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn verify_exit_codes() -> Result<String, String> {
    let mut runs = Vec::new();
    for spec in ["so3.spec", "aff1_action.spec"] {
        for suite in [
            "rn",
            "icov",
            "covcov",
            "main",
            "derivations",
            "dsquare",
            "tensoriality",
        ] {
            runs.push(vec![
                fixture(spec).display().to_string(),
                "--suite".into(),
                suite.into(),
                "--seed".into(),
                "7".into(),
            ]);
        }
    }
    for suite in ["covcov", "main", "rn"] {
        runs.push(vec![
            fixture("so3.spec").display().to_string(),
            "--suite".into(),
            suite.into(),
            "--seed".into(),
            "1".into(),
            "--connection".into(),
            "zero".into(),
        ]);
    }
    let mut failing_reports = 0;
    for args in &runs {
        let out = Command::new(env!("CARGO_BIN_EXE_froelicher"))
            .arg("verify")
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        let header = stdout.lines().next().unwrap_or_default();
        let clean = header.contains(" fail=0 ")
            && header.ends_with(" rejected=0")
            && !header.contains("checks=0 ");
        let expected = if clean { 0 } else { 1 };
        if !clean {
            failing_reports += 1;
        }
        if out.status.code() != Some(expected) {
            return Err(format!(
                "verify {}: exit {:?} but report header is {header:?}",
                args.join(" "),
                out.status.code()
            ));
        }
    }
    let out = Command::new(env!("CARGO_BIN_EXE_froelicher"))
        .args([
            "verify",
            &fixture("so3.spec").display().to_string(),
            "--suite",
            "nope",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(2) {
        return Err(format!(
            "unknown suite exits with {:?}, expected 2",
            out.status.code()
        ));
    }
    Ok(format!(
        "{} verify runs ({failing_reports} with rejections) and a usage error all exit as reported",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let results = [round_trip(), verify_exit_codes()];
    let passed = results.iter().all(Result::is_ok);
    let detail: Vec<String> = results
        .into_iter()
        .map(|r| match r {
            Ok(s) => s,
            Err(s) => format!("FAILED: {s}"),
        })
        .collect();
    println!(
        "criterion 8 CLI round-trip and verify exit codes: {} ({:.1}s) {}",
        if passed { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        detail.join("; ")
    );
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
