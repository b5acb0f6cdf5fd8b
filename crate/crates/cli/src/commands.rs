use std::path::PathBuf;

use clap::{Parser, Subcommand};
use froelicher::oracle::{run_suite, SuiteConfig, SuiteInstance, SuiteName};
use froelicher::{
    default_connection, deform, fn_bracket, nijenhuis, Connection, Section, Target,
    ValidationReport,
};

use crate::error::CliError;
use crate::spec::{algebroid_record, form_record, poly_record, read_spec, to_json, SpecFile};

#[derive(Debug, Parser)]
#[command(
    name = "froelicher",
    version,
    about = "Exact Frölicher–Nijenhuis calculus on Lie algebroids"
)]
pub struct Cli {
    /// Load the algebroid even if it fails the Jacobi or anchor checks
    #[arg(long, global = true)]
    pub skip_validate: bool,

    /// Write results to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the algebroid (Jacobi identity and anchor morphism)
    Check { spec: PathBuf },

    /// Frölicher–Nijenhuis bracket of two A-valued forms
    Fn {
        spec: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        /// Torsion-free connection on A; defaults to the symmetrized zero connection
        #[arg(long)]
        connection: Option<String>,
    },

    /// Nijenhuis tensor of a (1,1)-tensor
    Nijenhuis {
        spec: PathBuf,
        #[arg(long)]
        n: String,
        #[arg(long)]
        connection: Option<String>,
    },

    /// Deformed bracket and anchor induced by a (1,1)-tensor
    Deform {
        spec: PathBuf,
        #[arg(long)]
        n: String,
    },

    /// Evaluate a form on frame elements (1-based indices)
    Eval {
        spec: PathBuf,
        #[arg(long)]
        form: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        args: Vec<usize>,
    },

    /// Run a randomized verification suite on the spec's algebroid
    Verify {
        spec: PathBuf,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Use this connection on A instead of random torsion-free ones
        #[arg(long)]
        connection: Option<String>,
    },
}

/// Printed output and whether every check it reports succeeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            success: true,
        }
    }
}

fn torsion_free<'a>(
    spec: &'a SpecFile,
    name: Option<&str>,
) -> Result<(String, std::borrow::Cow<'a, Connection>), CliError> {
    match name {
        None => Ok((
            "# connection: symmetrize(zero), synthesized because --connection was not given".into(),
            std::borrow::Cow::Owned(default_connection(spec.algebroid.clone())),
        )),
        Some(name) => {
            let conn = spec.connection(name)?;
            if conn.bundle() != Target::Algebroid {
                return Err(CliError::Usage(format!(
                    "connection {name:?} is on {}; a connection on A is required",
                    conn.bundle()
                )));
            }
            if !conn.is_torsion_free() {
                return Err(CliError::Usage(format!(
                    "connection {name:?} has nonzero torsion; pass a torsion-free connection or omit --connection"
                )));
            }
            Ok((
                format!("# connection: {name}"),
                std::borrow::Cow::Borrowed(conn),
            ))
        }
    }
}

fn report_lines(report: &ValidationReport) -> String {
    let mut out = report.to_string();
    if let Some(w) = report.jacobi_witness() {
        let (a, b, c) = w.triple;
        out.push_str(&format!(
            "\njacobi witness: (e{}, e{}, e{}) residual {}",
            a + 1,
            b + 1,
            c + 1,
            w.residual
        ));
    }
    if let Some(w) = report.anchor_witness() {
        let (a, b) = w.pair;
        out.push_str(&format!(
            "\nanchor witness: (e{}, e{}) on x{} residual {}",
            a + 1,
            b + 1,
            w.coordinate + 1,
            w.residual
        ));
    }
    out
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let validate = !cli.skip_validate;
    match &cli.command {
        Command::Check { spec } => {
            let spec = read_spec(spec, false)?;
            Ok(Outcome {
                text: report_lines(&spec.validation),
                success: spec.validation.passes(),
            })
        }
        Command::Fn {
            spec,
            phi,
            psi,
            connection,
        } => {
            let spec = read_spec(spec, validate)?;
            let (header, conn) = torsion_free(&spec, connection.as_deref())?;
            let k = fn_bracket(&conn, spec.form(phi)?, spec.form(psi)?)?;
            let record = form_record(&format!("[{phi},{psi}]"), &k);
            Ok(Outcome::ok(format!("{header}\n{}", to_json(&record))))
        }
        Command::Nijenhuis {
            spec,
            n,
            connection,
        } => {
            let spec = read_spec(spec, validate)?;
            let (header, conn) = torsion_free(&spec, connection.as_deref())?;
            let t = nijenhuis(&conn, spec.form(n)?)?;
            let record = form_record(&format!("N_{n}"), &t);
            Ok(Outcome::ok(format!("{header}\n{}", to_json(&record))))
        }
        Command::Deform { spec, n } => {
            let spec = read_spec(spec, validate)?;
            let d = deform(&spec.algebroid, spec.form(n)?)?;
            let header: String = report_lines(&d.report)
                .lines()
                .map(|l| format!("# {l}\n"))
                .collect();
            Ok(Outcome {
                text: format!("{header}{}", to_json(&algebroid_record(&d.algebroid))),
                success: d.report.passes(),
            })
        }
        Command::Eval { spec, form, args } => {
            let spec = read_spec(spec, validate)?;
            let f = spec.form(form)?;
            let r = spec.algebroid.rank();
            if args.len() as isize != f.degree() {
                return Err(CliError::Usage(format!(
                    "form {form:?} has degree {} but {} arguments were given",
                    f.degree(),
                    args.len()
                )));
            }
            let sections = args
                .iter()
                .map(|&i| {
                    if i == 0 || i > r {
                        Err(CliError::Usage(format!(
                            "frame index {i} out of range 1..={r}"
                        )))
                    } else {
                        Ok(spec.algebroid.basis(i - 1))
                    }
                })
                .collect::<Result<Vec<Section>, _>>()?;
            let value = f.eval(&sections)?;
            let polys: Vec<_> = value.coeffs().iter().map(poly_record).collect();
            Ok(Outcome::ok(to_json(&polys)))
        }
        Command::Verify {
            spec,
            suite,
            seed,
            rounds,
            connection,
        } => {
            let name: SuiteName = suite
                .parse()
                .map_err(|e: froelicher::Error| CliError::Usage(e.to_string()))?;
            let spec = read_spec(spec, validate)?;
            let mut instance = SuiteInstance::new("spec", (*spec.algebroid).clone());
            if let Some(c) = connection {
                instance = instance.with_connection(spec.connection(c)?.clone())?;
            }
            let report = run_suite(name, &[instance], &SuiteConfig::new(*seed).rounds(*rounds));
            Ok(Outcome {
                text: report.to_text().trim_end().to_string(),
                success: report.all_passed(),
            })
        }
    }
}
