//! Randomized verification suites over a list of algebroid instances.

use std::fmt::{self, Display};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::bruteforce::{
    curvature_direct, d_scalar_bruteforce, fn_extract, insert_bruteforce, nijenhuis_classical,
    r_extended_bruteforce,
};
use crate::algebroid::{Algebroid, Section, Target};
use crate::connections::{nabla_x_form, Connection};
use crate::error::{Error, Result};
use crate::fncalc::{cov_phi, fn_bracket, lie_deriv, nijenhuis, r_extended, GradedOperator};
use crate::random::FormSampler;
use crate::scalars::{rat, sign_pow};
use crate::vforms::{insert, wedge, VForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteName {
    Rn,
    Icov,
    CovCov,
    Main,
    Derivations,
    DSquare,
    Tensoriality,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Rn,
        SuiteName::Icov,
        SuiteName::CovCov,
        SuiteName::Main,
        SuiteName::Derivations,
        SuiteName::DSquare,
        SuiteName::Tensoriality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Rn => "rn",
            SuiteName::Icov => "icov",
            SuiteName::CovCov => "covcov",
            SuiteName::Main => "main",
            SuiteName::Derivations => "derivations",
            SuiteName::DSquare => "dsquare",
            SuiteName::Tensoriality => "tensoriality",
        }
    }

    fn needs_torsion_free(self) -> bool {
        !matches!(self, SuiteName::Rn | SuiteName::DSquare)
    }
}

impl Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SuiteName::ALL.iter().map(|n| n.as_str()).collect();
                Error::Invalid(format!(
                    "unknown suite {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Rejected,
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Rejected => "REJECTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub inputs: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub instance: String,
    pub identity: &'static str,
    pub formula: &'static str,
    pub status: Status,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// True when every check passed and nothing was rejected.
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != Status::Pass)
    }

    /// One header line, then one line per check; failing checks carry their
    /// witness on indented lines.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite={} seed={} checks={} pass={} fail={} rejected={}\n",
            self.suite,
            self.seed,
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Rejected),
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} | {} | {}\n",
                c.status, c.instance, c.identity, c.formula
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!(
                    "    inputs: {}\n    lhs: {}\n    rhs: {}\n",
                    w.inputs, w.lhs, w.rhs
                ));
            }
        }
        out
    }
}

impl Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A named algebroid, optionally with a user-chosen connection on `A` that
/// replaces the randomly sampled torsion-free one.
#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub name: String,
    pub algebroid: Arc<Algebroid>,
    pub connection: Option<Connection>,
}

impl SuiteInstance {
    pub fn new(name: impl Into<String>, algebroid: Algebroid) -> Self {
        SuiteInstance {
            name: name.into(),
            algebroid: Arc::new(algebroid),
            connection: None,
        }
    }

    pub fn with_connection(mut self, connection: Connection) -> Result<Self> {
        if connection.bundle() != Target::Algebroid {
            return Err(Error::BundleMismatch(
                "suite connection must be on A".into(),
            ));
        }
        if **connection.algebroid() != *self.algebroid {
            return Err(Error::BundleMismatch(
                "suite connection is over another algebroid".into(),
            ));
        }
        self.connection = Some(connection);
        Ok(self)
    }

    pub fn zoo() -> Vec<SuiteInstance> {
        Algebroid::zoo()
            .into_iter()
            .map(|(name, alg)| SuiteInstance::new(name, alg))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub rounds: usize,
    /// Largest form degree `k`, `l` used for the operator arguments.
    pub max_degree: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            rounds: 1,
            max_degree: 2,
        }
    }

    pub fn rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Job<'a> {
    inst: &'a SuiteInstance,
    k: usize,
    l: usize,
    round: usize,
    seed: u64,
}

impl Job<'_> {
    fn label(&self) -> String {
        format!(
            "{} k={} l={} round={}",
            self.inst.name, self.k, self.l, self.round
        )
    }

    fn bundle(&self) -> Target {
        if self.round.is_multiple_of(2) {
            Target::Scalar
        } else {
            Target::Bundle(crate::algebroid::VectorBundle::new(2).expect("rank 2"))
        }
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn compare<T, I>(
        &mut self,
        instance: String,
        identity: &'static str,
        formula: &'static str,
        inputs: I,
        lhs: Result<T>,
        rhs: Result<T>,
    ) where
        T: PartialEq + Display,
        I: FnOnce() -> String,
    {
        let (status, witness) = match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => (Status::Pass, None),
            (a, b) => {
                let show = |r: Result<T>| match r {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("error: {e}"),
                };
                (
                    Status::Fail,
                    Some(Witness {
                        inputs: inputs(),
                        lhs: show(a),
                        rhs: show(b),
                    }),
                )
            }
        };
        self.checks.push(Check {
            instance,
            identity,
            formula,
            status,
            witness,
        });
    }
}

/// Runs one suite over every instance, every pair of operator degrees up to
/// `config.max_degree` and `config.rounds` random draws. The output order is
/// deterministic.
pub fn run_suite(
    name: SuiteName,
    instances: &[SuiteInstance],
    config: &SuiteConfig,
) -> VerificationReport {
    let mut jobs = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for k in 0..=config.max_degree {
            for l in 0..=config.max_degree {
                for round in 0..config.rounds {
                    let seed = mix(mix(mix(mix(config.seed) ^ i as u64)
                        ^ (k as u64) << 8
                        ^ l as u64)
                        ^ round as u64);
                    jobs.push(Job {
                        inst,
                        k,
                        l,
                        round,
                        seed,
                    });
                }
            }
        }
    }
    let mut checks: Vec<Check> = Vec::new();
    let mut runnable = Vec::new();
    let mut rejected: Vec<&str> = Vec::new();
    for job in jobs {
        let torsionful = job
            .inst
            .connection
            .as_ref()
            .is_some_and(|c| !c.is_torsion_free());
        if name.needs_torsion_free() && torsionful {
            if !rejected.contains(&job.inst.name.as_str()) {
                rejected.push(&job.inst.name);
                checks.push(Check {
                    instance: job.inst.name.clone(),
                    identity: "precondition",
                    formula: "torsion-free connection on A",
                    status: Status::Rejected,
                    witness: Some(Witness {
                        inputs: job
                            .inst
                            .connection
                            .as_ref()
                            .map_or_else(String::new, |c| format!("{c:?}")),
                        lhs: job
                            .inst
                            .connection
                            .as_ref()
                            .and_then(|c| c.torsion().ok())
                            .map_or_else(String::new, |t| t.to_string()),
                        rhs: "0".into(),
                    }),
                });
            }
            continue;
        }
        runnable.push(job);
    }
    let per_job: Vec<Vec<Check>> = runnable
        .par_iter()
        .map(|job| {
            let mut rec = Recorder { checks: Vec::new() };
            match name {
                SuiteName::Rn => suite_rn(job, &mut rec),
                SuiteName::Icov => suite_icov(job, &mut rec),
                SuiteName::CovCov => suite_covcov(job, &mut rec),
                SuiteName::Main => suite_main(job, &mut rec),
                SuiteName::Derivations => suite_derivations(job, &mut rec),
                SuiteName::DSquare => suite_dsquare(job, &mut rec),
                SuiteName::Tensoriality => suite_tensoriality(job, &mut rec),
            }
            rec.checks
        })
        .collect();
    checks.extend(per_job.into_iter().flatten());
    VerificationReport {
        suite: name,
        seed: config.seed,
        checks,
    }
}

type LabelledPair<'a> = (
    &'static str,
    &'static str,
    Result<(GradedOperator<'a>, GradedOperator<'a>)>,
);

fn torsion_free_for(job: &Job<'_>, s: &mut FormSampler<'_>) -> Connection {
    match &job.inst.connection {
        Some(c) => c.clone(),
        None => s.torsion_free(job.inst.algebroid.clone()),
    }
}

fn signed(e: isize, f: VForm) -> VForm {
    f.scale(&rat(sign_pow(e)))
}

fn show_inputs(pairs: &[(&str, &VForm)]) -> String {
    pairs
        .iter()
        .map(|(n, f)| format!("{n} = {f}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn suite_rn(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let (k, l) = (job.k as isize, job.l as isize);
    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    let e = job.bundle();
    for q in 0..=alg.rank() {
        let w = s.form(q, e);
        let lhs = (|| {
            let op = GradedOperator::commutator(
                GradedOperator::insertion(phi.clone())?,
                GradedOperator::insertion(psi.clone())?,
            );
            op.apply(&w)
        })();
        let rhs = (|| {
            let a = insert(&insert(&phi, &psi)?, &w)?;
            let b = insert(&insert(&psi, &phi)?, &w)?;
            a.checked_sub(&signed((k - 1) * (l - 1), b))
        })();
        rec.compare(
            format!("{} E={e} q={q}", job.label()),
            "insertion-commutator",
            "[i_phi, i_psi] = i_{i_phi psi} - (-1)^{(k-1)(l-1)} i_{i_psi phi}",
            || show_inputs(&[("phi", &phi), ("psi", &psi), ("s", &w)]),
            lhs,
            rhs,
        );
    }
}

fn suite_icov(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let (k, l) = (job.k as isize, job.l as isize);
    let conn_a = torsion_free_for(job, &mut s);
    let e = job.bundle();
    let conn_e = s.connection(alg.clone(), e);
    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    for q in 0..=alg.rank() {
        let w = s.form(q, e);
        let lhs = (|| {
            GradedOperator::commutator(
                GradedOperator::cov_phi(&conn_a, &conn_e, phi.clone())?,
                GradedOperator::insertion(psi.clone())?,
            )
            .apply(&w)
        })();
        let rhs = (|| {
            let a = insert(&cov_phi(&conn_a, &conn_a, &phi, &psi)?, &w)?;
            let b = cov_phi(&conn_a, &conn_e, &insert(&psi, &phi)?, &w)?;
            a.checked_sub(&signed(k * (l - 1), b))
        })();
        rec.compare(
            format!("{} E={e} q={q}", job.label()),
            "covariant-insertion-commutator",
            "[nabla_phi, i_psi] = i_{nabla_phi psi} - (-1)^{k(l-1)} nabla_{i_psi phi}",
            || show_inputs(&[("phi", &phi), ("psi", &psi), ("s", &w)]),
            lhs,
            rhs,
        );
    }
}

fn suite_covcov(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let (k, l) = (job.k as isize, job.l as isize);
    let conn_a = torsion_free_for(job, &mut s);
    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    let flat = [
        ("anchor", Connection::anchor_connection(alg.clone())),
        (
            "zero-rank2",
            Connection::zero(alg.clone(), Target::bundle(2).expect("rank 2")),
        ),
    ];
    for (cname, conn_e) in &flat {
        for q in 0..=alg.rank() {
            let w = s.form(q, conn_e.bundle());
            let lhs = (|| {
                GradedOperator::commutator(
                    GradedOperator::cov_phi(&conn_a, conn_e, phi.clone())?,
                    GradedOperator::cov_phi(&conn_a, conn_e, psi.clone())?,
                )
                .apply(&w)
            })();
            let rhs = (|| {
                let a = cov_phi(&conn_a, conn_e, &cov_phi(&conn_a, &conn_a, &phi, &psi)?, &w)?;
                let b = cov_phi(&conn_a, conn_e, &cov_phi(&conn_a, &conn_a, &psi, &phi)?, &w)?;
                let c = insert(&r_extended(&conn_a, &phi, &psi)?, &w)?;
                a.checked_sub(&signed(k * l, b))?.checked_sub(&c)
            })();
            rec.compare(
                format!("{} nablaE={cname} q={q}", job.label()),
                "covariant-commutator",
                "[nabla_phi, nabla_psi] = nabla_{nabla_phi psi} - (-1)^{kl} nabla_{nabla_psi phi} - i_{R(phi,psi)}",
                || show_inputs(&[("phi", &phi), ("psi", &psi), ("s", &w)]),
                lhs,
                rhs,
            );
        }
    }
}

fn suite_main(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let (k, l) = (job.k as isize, job.l as isize);
    let conn_1 = torsion_free_for(job, &mut s);
    let conn_2 = s.torsion_free(alg.clone());
    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    let label = job.label();
    let inputs = || show_inputs(&[("phi", &phi), ("psi", &psi)]);
    let bracket = fn_bracket(&conn_1, &phi, &psi);
    rec.compare(
        label.clone(),
        "bracket-vs-extraction",
        "L_phi psi - (-1)^{kl} L_psi phi = K where [L_phi, i_psi] = i_K - (-1)^{k(l-1)} L_{i_psi phi}",
        inputs,
        bracket.clone(),
        fn_extract(&conn_1, &phi, &psi),
    );
    rec.compare(
        label.clone(),
        "connection-independence",
        "[phi, psi] computed with two torsion-free connections agrees",
        inputs,
        bracket.clone(),
        fn_bracket(&conn_2, &phi, &psi),
    );
    let anchor = Connection::anchor_connection(alg.clone());
    for q in 0..=alg.rank() {
        let w = s.form(q, Target::Scalar);
        let lhs = (|| {
            let comm = GradedOperator::commutator(
                GradedOperator::lie_deriv(&anchor, phi.clone())?,
                GradedOperator::insertion(psi.clone())?,
            );
            let corr = GradedOperator::lie_deriv(&anchor, insert(&psi, &phi)?)?;
            GradedOperator::sum(vec![(rat(1), comm), (rat(sign_pow(k * (l - 1))), corr)])?.apply(&w)
        })();
        let rhs = bracket.clone().and_then(|b| insert(&b, &w));
        rec.compare(
            format!("{label} q={q}"),
            "defining-operator-identity",
            "[L_phi, i_psi] + (-1)^{k(l-1)} L_{i_psi phi} = i_{[phi,psi]} on scalar forms",
            || show_inputs(&[("phi", &phi), ("psi", &psi), ("omega", &w)]),
            lhs,
            rhs,
        );
    }
    let m = job.round % 2;
    if job.k + job.l + m <= alg.rank() {
        let chi = s.form(m, Target::Algebroid);
        let br = |a: &VForm, b: &VForm| fn_bracket(&conn_1, a, b);
        let lhs = br(&psi, &chi).and_then(|pc| br(&phi, &pc));
        let rhs = (|| {
            let first = br(&br(&phi, &psi)?, &chi)?;
            let second = br(&psi, &br(&phi, &chi)?)?;
            first.checked_add(&signed(k * l, second))
        })();
        rec.compare(
            format!("{label} m={m}"),
            "graded-jacobi",
            "[phi,[psi,chi]] = [[phi,psi],chi] + (-1)^{kl} [psi,[phi,chi]]",
            || show_inputs(&[("phi", &phi), ("psi", &psi), ("chi", &chi)]),
            lhs,
            rhs,
        );
    }
    if k == 0 && l == 0 {
        let rhs = (|| {
            let x = phi.value(&[]);
            let y = psi.value(&[]);
            VForm::section(alg, Target::Algebroid, alg.bracket(&x, &y)?)
        })();
        rec.compare(
            label,
            "degree-zero-bracket",
            "[X, Y]_FN = [X, Y]",
            inputs,
            bracket,
            rhs,
        );
    }
}

fn suite_derivations(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let (k, l) = (job.k as isize, job.l as isize);
    let conn_a = torsion_free_for(job, &mut s);
    let e = job.bundle();
    let conn_e = s.connection(alg.clone(), e);
    let anchor = Connection::anchor_connection(alg.clone());
    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    let label = job.label();
    let r = alg.rank();

    let ops: Vec<LabelledPair<'_>> = vec![
        (
            "insertion",
            "i_phi(alpha ∧ s) = i_phi alpha ∧ s + (-1)^{(k-1)a} alpha ∧ i_phi s",
            GradedOperator::insertion(phi.clone()).map(|d| (d.clone(), d)),
        ),
        (
            "exterior-derivative",
            "d(alpha ∧ s) = d alpha ∧ s + (-1)^a alpha ∧ d s",
            Ok((
                GradedOperator::d_nabla(&conn_e),
                GradedOperator::d_nabla(&anchor),
            )),
        ),
        (
            "lie-derivative",
            "L_phi(alpha ∧ s) = L_phi alpha ∧ s + (-1)^{ka} alpha ∧ L_phi s",
            GradedOperator::lie_deriv(&conn_e, phi.clone())
                .and_then(|d| Ok((d, GradedOperator::lie_deriv(&anchor, phi.clone())?))),
        ),
        (
            "covariant-derivative",
            "nabla_phi(alpha ∧ s) = nabla_phi alpha ∧ s + (-1)^{ka} alpha ∧ nabla_phi s",
            GradedOperator::cov_phi(&conn_a, &conn_e, phi.clone())
                .and_then(|d| Ok((d, GradedOperator::cov_phi(&conn_a, &anchor, phi.clone())?))),
        ),
    ];

    for a in 0..=r {
        let alpha = s.form(a, Target::Scalar);
        let w = s.form((job.round + job.l + a) % (r + 1), e);
        let inputs = || show_inputs(&[("phi", &phi), ("alpha", &alpha), ("s", &w)]);
        for (name, formula, op) in &ops {
            let (d, dbar) = match op {
                Ok(pair) => pair,
                Err(err) => {
                    let err = err.clone();
                    rec.compare::<VForm, _>(
                        format!("{label} a={a}"),
                        name,
                        formula,
                        inputs,
                        Err(err.clone()),
                        Err(err),
                    );
                    continue;
                }
            };
            let lhs = wedge(&alpha, &w).and_then(|aw| d.apply(&aw));
            let rhs = (|| {
                let first = wedge(&dbar.apply(&alpha)?, &w)?;
                let second = wedge(&alpha, &d.apply(&w)?)?;
                first.checked_add(&signed(d.degree() * a as isize, second))
            })();
            rec.compare(
                format!("{label} E={e} a={a}"),
                name,
                formula,
                inputs,
                lhs,
                rhs,
            );

            let lhs = (|| {
                GradedOperator::commutator(d.clone(), GradedOperator::epsilon(alpha.clone())?)
                    .apply(&w)
            })();
            let rhs = dbar.apply(&alpha).and_then(|da| wedge(&da, &w));
            rec.compare(
                format!("{label} E={e} a={a}"),
                "epsilon-commutator",
                "[D, epsilon_alpha] = epsilon_{D alpha}",
                inputs,
                lhs,
                rhs,
            );
        }

        let lhs = wedge(&alpha, &phi).and_then(|ap| cov_phi(&conn_a, &conn_e, &ap, &w));
        let rhs = cov_phi(&conn_a, &conn_e, &phi, &w).and_then(|v| wedge(&alpha, &v));
        rec.compare(
            format!("{label} E={e} a={a}"),
            "covariant-tensoriality",
            "nabla_{alpha ∧ phi} s = alpha ∧ nabla_phi s",
            inputs,
            lhs,
            rhs,
        );
    }

    let ab = fn_bracket(&conn_a, &phi, &psi);
    let ba = fn_bracket(&conn_a, &psi, &phi).map(|b| signed(k * l + 1, b));
    rec.compare(
        label.clone(),
        "graded-antisymmetry",
        "[phi, psi] = -(-1)^{kl} [psi, phi]",
        || show_inputs(&[("phi", &phi), ("psi", &psi)]),
        ab,
        ba,
    );

    if k == 0 {
        let x = phi.value(&[]);
        for q in 0..=r {
            let w = s.form(q, e);
            let lhs = lie_deriv(&conn_e, &phi, &w);
            let rhs = (|| {
                let nx = nabla_x_form(&conn_a, &conn_e, &x, &w)?;
                nx.checked_add(&insert(&conn_a.d_nabla(&phi)?, &w)?)
            })();
            rec.compare(
                format!("{label} E={e} q={q}"),
                "lie-along-section",
                "L_X s = nabla_X s + i_{nabla X} s",
                || show_inputs(&[("X", &phi), ("s", &w)]),
                lhs,
                rhs,
            );
        }
    }
}

fn suite_dsquare(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let e = job.bundle();
    let conn_e = s.connection(alg.clone(), e);
    let anchor = Connection::anchor_connection(alg.clone());
    let label = job.label();
    let q = (job.k * 3 + job.l) % (alg.rank() + 1);
    let w = s.form(q, e);
    rec.compare(
        format!("{label} E={e} q={q}"),
        "curvature-of-d",
        "d^nabla d^nabla s = R ∧ s",
        || show_inputs(&[("s", &w)]),
        conn_e.d_nabla(&w).and_then(|dw| conn_e.d_nabla(&dw)),
        conn_e.curvature_action(&w),
    );
    let omega = s.form(q, Target::Scalar);
    rec.compare(
        format!("{label} q={q}"),
        "d-squared-zero",
        "d d omega = 0 for the anchor connection",
        || show_inputs(&[("omega", &omega)]),
        anchor.d_nabla(&omega).and_then(|dw| anchor.d_nabla(&dw)),
        Ok(VForm::zero(alg, q as isize + 2, Target::Scalar)),
    );
    rec.compare(
        format!("{label} q={q}"),
        "differential-vs-alternation",
        "shuffle d omega = alternation d omega",
        || show_inputs(&[("omega", &omega)]),
        anchor.d_nabla(&omega),
        d_scalar_bruteforce(alg, &omega),
    );
}

fn suite_tensoriality(job: &Job<'_>, rec: &mut Recorder) {
    let alg = &job.inst.algebroid;
    let mut s = FormSampler::new(alg, job.seed);
    let conn_a = torsion_free_for(job, &mut s);
    let e = job.bundle();
    let conn_e = s.connection(alg.clone(), e);
    let label = job.label();
    let m = e.rank(alg.rank());

    let (x, y) = (s.section(), s.section());
    let v = s.bundle_section(m);
    let f = s.poly();
    let show_xy = || format!("X = {x}; Y = {y}; s = {v}; f = {f}");
    rec.compare(
        format!("{label} E={e}"),
        "curvature-table",
        "R(X,Y)s from frame table = nabla_X nabla_Y s - nabla_Y nabla_X s - nabla_[X,Y] s",
        show_xy,
        Ok(conn_e.curvature().apply(&x, &y, &v)),
        Ok(curvature_direct(&conn_e, &x, &y, &v)),
    );
    rec.compare(
        format!("{label} E={e}"),
        "curvature-tensorial",
        "R(fX,Y)s = f R(X,Y)s",
        show_xy,
        Ok(curvature_direct(&conn_e, &x.scale(&f), &y, &v)),
        Ok(curvature_direct(&conn_e, &x, &y, &v).scale(&f)),
    );
    let torsion_direct = (|| {
        let mut t = &conn_a.cov_deriv(&x, &y)? - &conn_a.cov_deriv(&y, &x)?;
        t.sub_assign(&alg.bracket(&x, &y)?);
        Ok::<Section, Error>(t)
    })();
    rec.compare(
        label.to_string(),
        "torsion-table",
        "T(X,Y) = nabla_X Y - nabla_Y X - [X,Y]",
        show_xy,
        conn_a
            .torsion()
            .and_then(|t| t.eval(&[x.clone(), y.clone()])),
        torsion_direct,
    );

    let phi = s.form(job.k, Target::Algebroid);
    let psi = s.form(job.l, Target::Algebroid);
    let inputs = || show_inputs(&[("phi", &phi), ("psi", &psi)]);
    rec.compare(
        label.clone(),
        "extended-curvature",
        "shuffle R(phi,psi) = alternation R(phi,psi)",
        inputs,
        r_extended(&conn_a, &phi, &psi),
        r_extended_bruteforce(&conn_a, &phi, &psi),
    );
    let target = s.form(job.l + 1, e);
    rec.compare(
        format!("{label} E={e}"),
        "insertion-vs-alternation",
        "shuffle i_phi s = alternation i_phi s",
        || show_inputs(&[("phi", &phi), ("s", &target)]),
        insert(&phi, &target),
        insert_bruteforce(&phi, &target, alg),
    );

    let deg = job.k + job.l;
    if deg <= alg.rank() {
        let w = s.form(deg, e);
        let args: Vec<Section> = (0..deg).map(|_| s.section()).collect();
        let mut scaled = args.clone();
        if let Some(first) = scaled.first_mut() {
            *first = first.scale(&f);
        }
        rec.compare(
            format!("{label} E={e}"),
            "evaluation-tensorial",
            "s(f Z_1, Z_2, ...) = f s(Z_1, Z_2, ...)",
            || show_inputs(&[("s", &w)]),
            w.eval(&scaled),
            w.eval(&args)
                .map(|v| if deg == 0 { v } else { v.scale(&f) }),
        );
    }

    if job.k == 1 && job.l == 1 {
        let j = s.form(1, Target::Algebroid);
        rec.compare(
            label,
            "nijenhuis-classical",
            "N_J = [J,J]/2 = [JX,JY] - J[JX,Y] - J[X,JY] + J^2[X,Y]",
            || show_inputs(&[("J", &j)]),
            nijenhuis(&conn_a, &j),
            nijenhuis_classical(alg, &j),
        );
    }
}
