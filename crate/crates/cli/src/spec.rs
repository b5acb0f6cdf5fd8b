//! Spec files: JSON documents holding an algebroid, named bundles,
//! connections and forms. Indices are 1-based, rationals are `"p/q"` strings
//! and a polynomial is a list of `{coeff, exps}` terms.

use std::path::Path;
use std::sync::Arc;

use froelicher::{
    parse_rational, Algebroid, ChristoffelEntry, Connection, MultiIndex, Poly, Section,
    StructureEntry, Target, VForm, ValidationReport,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub coeff: String,
    pub exps: Vec<u32>,
}

pub type RawPoly = Vec<RawTerm>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub algebroid: RawAlgebroid,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bundles: Vec<RawBundle>,
    #[serde(default)]
    pub connections: Vec<RawConnection>,
    #[serde(default)]
    pub forms: Vec<RawForm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAlgebroid {
    pub n: usize,
    pub r: usize,
    pub anchor: Vec<Vec<RawPoly>>,
    #[serde(default)]
    pub structure: Vec<RawStructure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStructure {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: RawPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBundle {
    pub name: String,
    pub rank: usize,
}

/// `"A"`, `"scalar"`, a declared bundle name, or `{"rank": m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawTarget {
    Name(String),
    Rank { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConnection {
    pub name: String,
    pub bundle: RawTarget,
    #[serde(default)]
    pub christoffel: Vec<RawChristoffel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChristoffel {
    pub a: usize,
    pub alpha: usize,
    pub beta: usize,
    pub value: RawPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawForm {
    pub name: String,
    pub degree: usize,
    pub target: RawTarget,
    #[serde(default)]
    pub components: Vec<RawComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComponent {
    pub index: Vec<usize>,
    pub value: Vec<RawPoly>,
}

/// A fully resolved spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecFile {
    pub algebroid: Arc<Algebroid>,
    pub bundles: Vec<(String, usize)>,
    pub connections: Vec<(String, Connection)>,
    pub forms: Vec<(String, VForm)>,
    pub validation: ValidationReport,
}

impl SpecFile {
    pub fn connection(&self, name: &str) -> Result<&Connection, CliError> {
        lookup(&self.connections, "connection", name)
    }

    pub fn form(&self, name: &str) -> Result<&VForm, CliError> {
        lookup(&self.forms, "form", name)
    }

    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            algebroid: algebroid_record(&self.algebroid),
            bundles: self
                .bundles
                .iter()
                .map(|(name, rank)| RawBundle {
                    name: name.clone(),
                    rank: *rank,
                })
                .collect(),
            connections: self
                .connections
                .iter()
                .map(|(name, c)| connection_record(name, c))
                .collect(),
            forms: self
                .forms
                .iter()
                .map(|(name, f)| form_record(name, f))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(&self.to_raw())
    }
}

fn lookup<'a, T>(
    items: &'a [(String, T)],
    kind: &'static str,
    name: &str,
) -> Result<&'a T, CliError> {
    items
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v)
        .ok_or_else(|| CliError::Unknown {
            kind,
            name: name.to_string(),
            available: items
                .iter()
                .map(|(n, _)| n.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("spec records serialize")
}

pub fn read_spec(path: &Path, validate: bool) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text, validate)
}

pub fn parse_spec(text: &str, validate: bool) -> Result<SpecFile, CliError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(syntax)?;
    resolve(&raw, validate)
}

fn syntax(e: serde_json::Error) -> CliError {
    CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn record_err(record: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Record {
        record: record.into(),
        message: message.to_string(),
    }
}

pub fn parse_poly(raw: &RawPoly, nvars: usize, record: &str) -> Result<Poly, CliError> {
    let mut terms = Vec::with_capacity(raw.len());
    for (i, t) in raw.iter().enumerate() {
        if t.exps.len() != nvars {
            return Err(record_err(
                record,
                format!(
                    "term {} has {} exponents, expected {nvars}",
                    i + 1,
                    t.exps.len()
                ),
            ));
        }
        let c = parse_rational(&t.coeff).map_err(|e| record_err(record, e))?;
        terms.push((t.exps.clone(), c));
    }
    Poly::from_terms(nvars, terms).map_err(|e| record_err(record, e))
}

pub fn poly_record(p: &Poly) -> RawPoly {
    p.terms()
        .rev()
        .map(|(e, c)| RawTerm {
            coeff: c.to_string(),
            exps: e.to_vec(),
        })
        .collect()
}

fn one_based(i: usize, bound: usize, what: &str, record: &str) -> Result<usize, CliError> {
    if i == 0 || i > bound {
        return Err(record_err(
            record,
            format!("{what} index {i} out of range 1..={bound}"),
        ));
    }
    Ok(i - 1)
}

fn resolve_target(
    raw: &RawTarget,
    bundles: &[(String, usize)],
    record: &str,
) -> Result<Target, CliError> {
    match raw {
        RawTarget::Name(n) if n == "A" => Ok(Target::Algebroid),
        RawTarget::Name(n) if n == "scalar" => Ok(Target::Scalar),
        RawTarget::Name(n) => match bundles.iter().find(|(b, _)| b == n) {
            Some((_, rank)) => Target::bundle(*rank).map_err(|e| record_err(record, e)),
            None => Err(record_err(
                record,
                format!("unknown bundle {n:?}; use \"A\", \"scalar\", a declared bundle or {{\"rank\": m}}"),
            )),
        },
        RawTarget::Rank { rank } => Target::bundle(*rank).map_err(|e| record_err(record, e)),
    }
}

fn target_record(t: Target) -> RawTarget {
    match t {
        Target::Scalar => RawTarget::Name("scalar".into()),
        Target::Algebroid => RawTarget::Name("A".into()),
        Target::Bundle(b) => RawTarget::Rank { rank: b.rank() },
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, kind: &str) -> Result<(), CliError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if matches!(n, "A" | "scalar") && kind == "bundle" {
            return Err(record_err(format!("bundle {n:?}"), "name is reserved"));
        }
        if !seen.insert(n) {
            return Err(record_err(format!("{kind} {n:?}"), "duplicate name"));
        }
    }
    Ok(())
}

pub fn resolve_algebroid(raw: &RawAlgebroid) -> Result<Algebroid, CliError> {
    let (n, r) = (raw.n, raw.r);
    if r == 0 {
        return Err(record_err("algebroid", "rank r must be at least 1"));
    }
    if raw.anchor.len() != r {
        return Err(record_err(
            "algebroid.anchor",
            format!(
                "expected {r} rows (one per frame element), found {}",
                raw.anchor.len()
            ),
        ));
    }
    let mut anchor = Vec::with_capacity(r);
    for (a, row) in raw.anchor.iter().enumerate() {
        let rec = format!("algebroid.anchor[{}]", a + 1);
        if row.len() != n {
            return Err(record_err(
                &rec,
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        anchor.push(
            row.iter()
                .enumerate()
                .map(|(i, p)| parse_poly(p, n, &format!("{rec}[{}]", i + 1)))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let mut entries = Vec::with_capacity(raw.structure.len());
    let mut seen = std::collections::BTreeSet::new();
    for (i, s) in raw.structure.iter().enumerate() {
        let rec = format!(
            "algebroid.structure[{}] (a={}, b={}, c={})",
            i + 1,
            s.a,
            s.b,
            s.c
        );
        let a = one_based(s.a, r, "a", &rec)?;
        let b = one_based(s.b, r, "b", &rec)?;
        let c = one_based(s.c, r, "c", &rec)?;
        if a == b {
            return Err(record_err(
                &rec,
                "a = b is not allowed; the bracket is antisymmetric",
            ));
        }
        if !seen.insert((a.min(b), a.max(b), c)) {
            return Err(record_err(&rec, "duplicate structure entry"));
        }
        let value = parse_poly(&s.value, n, &rec)?;
        entries.push(StructureEntry { a, b, c, value });
    }
    Algebroid::new(n, r, anchor, entries).map_err(|e| record_err("algebroid", e))
}

pub fn algebroid_record(alg: &Algebroid) -> RawAlgebroid {
    RawAlgebroid {
        n: alg.nvars(),
        r: alg.rank(),
        anchor: alg
            .anchor_rows()
            .iter()
            .map(|row| row.iter().map(poly_record).collect())
            .collect(),
        structure: alg
            .structure_entries()
            .into_iter()
            .map(|e| RawStructure {
                a: e.a + 1,
                b: e.b + 1,
                c: e.c + 1,
                value: poly_record(&e.value),
            })
            .collect(),
    }
}

fn resolve_connection(
    raw: &RawConnection,
    alg: &Arc<Algebroid>,
    bundles: &[(String, usize)],
) -> Result<Connection, CliError> {
    let rec = format!("connection {:?}", raw.name);
    let bundle = resolve_target(&raw.bundle, bundles, &rec)?;
    let m = bundle.rank(alg.rank());
    let mut entries = Vec::with_capacity(raw.christoffel.len());
    let mut seen = std::collections::BTreeSet::new();
    for (i, g) in raw.christoffel.iter().enumerate() {
        let erec = format!(
            "{rec}.christoffel[{}] (a={}, alpha={}, beta={})",
            i + 1,
            g.a,
            g.alpha,
            g.beta
        );
        let a = one_based(g.a, alg.rank(), "a", &erec)?;
        let alpha = one_based(g.alpha, m, "alpha", &erec)?;
        let beta = one_based(g.beta, m, "beta", &erec)?;
        if !seen.insert((a, alpha, beta)) {
            return Err(record_err(&erec, "duplicate Christoffel entry"));
        }
        let value = parse_poly(&g.value, alg.nvars(), &erec)?;
        entries.push(ChristoffelEntry {
            a,
            alpha,
            beta,
            value,
        });
    }
    Connection::new(alg.clone(), bundle, entries).map_err(|e| record_err(rec, e))
}

pub fn connection_record(name: &str, conn: &Connection) -> RawConnection {
    RawConnection {
        name: name.to_string(),
        bundle: target_record(conn.bundle()),
        christoffel: conn
            .entries()
            .into_iter()
            .map(|e| RawChristoffel {
                a: e.a + 1,
                alpha: e.alpha + 1,
                beta: e.beta + 1,
                value: poly_record(&e.value),
            })
            .collect(),
    }
}

pub fn resolve_form(
    raw: &RawForm,
    alg: &Algebroid,
    bundles: &[(String, usize)],
) -> Result<VForm, CliError> {
    let rec = format!("form {:?}", raw.name);
    let target = resolve_target(&raw.target, bundles, &rec)?;
    let fiber = target.rank(alg.rank());
    let mut comps = Vec::with_capacity(raw.components.len());
    let mut seen = std::collections::BTreeSet::new();
    for (i, c) in raw.components.iter().enumerate() {
        let crec = format!("{rec}.components[{}] (index {:?})", i + 1, c.index);
        if c.index.len() != raw.degree {
            return Err(record_err(
                &crec,
                format!(
                    "index has {} entries but the form has degree {}",
                    c.index.len(),
                    raw.degree
                ),
            ));
        }
        let idx = c
            .index
            .iter()
            .map(|&j| one_based(j, alg.rank(), "frame", &crec))
            .collect::<Result<Vec<_>, _>>()?;
        let idx = MultiIndex::new(idx)
            .map_err(|_| record_err(&crec, "index entries must be strictly increasing"))?;
        if !seen.insert(idx.clone()) {
            return Err(record_err(&crec, "duplicate component"));
        }
        if c.value.len() != fiber {
            return Err(record_err(
                &crec,
                format!(
                    "value has {} entries, expected fiber rank {fiber}",
                    c.value.len()
                ),
            ));
        }
        let value = c
            .value
            .iter()
            .map(|p| parse_poly(p, alg.nvars(), &crec))
            .collect::<Result<Vec<_>, _>>()?;
        comps.push((idx, Section::new(value)));
    }
    VForm::from_components(alg, raw.degree, target, comps).map_err(|e| record_err(rec, e))
}

/// Serializable record of a form; components appear in increasing
/// multi-index order.
pub fn form_record(name: &str, form: &VForm) -> RawForm {
    RawForm {
        name: name.to_string(),
        degree: form.degree().max(0) as usize,
        target: target_record(form.target()),
        components: form
            .components()
            .filter(|(_, v)| !v.is_zero())
            .map(|(idx, v)| RawComponent {
                index: idx.entries().iter().map(|i| i + 1).collect(),
                value: v.coeffs().iter().map(poly_record).collect(),
            })
            .collect(),
    }
}

/// Parses a single form record printed by [`form_record`].
pub fn parse_form(text: &str, alg: &Algebroid) -> Result<VForm, CliError> {
    let raw: RawForm = serde_json::from_str(text).map_err(syntax)?;
    resolve_form(&raw, alg, &[])
}

pub fn resolve(raw: &RawSpec, validate: bool) -> Result<SpecFile, CliError> {
    let algebroid = Arc::new(resolve_algebroid(&raw.algebroid)?);
    check_unique(raw.bundles.iter().map(|b| b.name.as_str()), "bundle")?;
    check_unique(
        raw.connections.iter().map(|c| c.name.as_str()),
        "connection",
    )?;
    check_unique(raw.forms.iter().map(|f| f.name.as_str()), "form")?;
    let mut bundles = Vec::with_capacity(raw.bundles.len());
    for b in &raw.bundles {
        if b.rank == 0 {
            return Err(record_err(
                format!("bundle {:?}", b.name),
                "rank must be at least 1",
            ));
        }
        bundles.push((b.name.clone(), b.rank));
    }
    let connections = raw
        .connections
        .iter()
        .map(|c| Ok((c.name.clone(), resolve_connection(c, &algebroid, &bundles)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let forms = raw
        .forms
        .iter()
        .map(|f| Ok((f.name.clone(), resolve_form(f, &algebroid, &bundles)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let validation = algebroid.validate();
    if validate {
        if let Some(w) = validation.jacobi_witness() {
            let (a, b, c) = w.triple;
            return Err(CliError::Validation(format!(
                "Jacobi identity fails on (e{}, e{}, e{}) with residual {}; pass --skip-validate to load it anyway",
                a + 1,
                b + 1,
                c + 1,
                w.residual
            )));
        }
        if let Some(w) = validation.anchor_witness() {
            let (a, b) = w.pair;
            return Err(CliError::Validation(format!(
                "anchor is not a bracket morphism on (e{}, e{}) at x{} with residual {}; pass --skip-validate to load it anyway",
                a + 1,
                b + 1,
                w.coordinate + 1,
                w.residual
            )));
        }
    }
    Ok(SpecFile {
        algebroid,
        bundles,
        connections,
        forms,
        validation,
    })
}
