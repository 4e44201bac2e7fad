//! The problem catalog: 33 entries with prose, relations and metadata.
//!
//! The bundled file lives in `data/catalog.json`; its schema is
//! `data/catalog.schema.json`. Relations are stored as S-expressions (see
//! [`crate::sexpr`]) and parsed against each entry's declared symbols at load.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Rational};
use crate::expr::{Assignment, Expr, Relation};
use crate::sexpr::{self, SymbolKind};

pub const PROBLEM_COUNT: u32 = 33;
pub const MISSING_IDS: [u32; 2] = [7, 24];

static BUNDLED: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Congruence,
    Degree3,
    Degree4plus,
    Diophantine,
    Multiplicative,
    Missing,
}

impl Classification {
    pub const ALL: [Classification; 6] = [
        Classification::Congruence,
        Classification::Degree3,
        Classification::Degree4plus,
        Classification::Diophantine,
        Classification::Multiplicative,
        Classification::Missing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Congruence => "congruence",
            Classification::Degree3 => "degree3",
            Classification::Degree4plus => "degree4plus",
            Classification::Diophantine => "diophantine",
            Classification::Multiplicative => "multiplicative",
            Classification::Missing => "missing",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown classification `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub default: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub name: String,
    pub description: String,
    pub relations: Vec<Relation>,
}

/// A printed polynomial form kept for comparison with derived reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceForm {
    pub label: String,
    pub variable: String,
    pub expr: Expr,
    /// Claimed sign of the discriminant ("negative", "zero", "positive").
    pub discriminant_claim: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub id: u32,
    pub title: String,
    pub prose: String,
    pub unknowns: Vec<String>,
    pub parameters: Vec<Parameter>,
    pub relations: Vec<Relation>,
    pub classification: Classification,
    pub notes: Vec<String>,
    pub citations: Vec<String>,
    pub variants: Vec<Variant>,
    pub reference_forms: Vec<ReferenceForm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub version: String,
    pub problems: Vec<ProblemSpec>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog is not valid JSON for the schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("cannot read catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("problem {id}: {location}: {message}")]
    Invalid { id: u32, location: String, message: String },
    #[error("duplicate problem id {0}")]
    DuplicateId(u32),
    #[error("expected {PROBLEM_COUNT} problems, found {0}")]
    WrongCount(usize),
    #[error("ids classified missing must be exactly {{7, 24}}, found {0:?}")]
    MissingSet(Vec<u32>),
    #[error("problem id {0} is out of range 1..={PROBLEM_COUNT}")]
    OutOfRange(u32),
    #[error("problem {id} has no variant `{name}`")]
    UnknownVariant { id: u32, name: String },
    #[error("problem {id} has no parameter `{name}`")]
    UnknownParameter { id: u32, name: String },
}

// On-disk shapes. Unknown fields are rejected everywhere.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    version: String,
    problems: Vec<RawProblem>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameter {
    name: String,
    default: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    name: String,
    description: String,
    relations: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    label: String,
    variable: String,
    expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discriminant_claim: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: u32,
    title: String,
    prose: String,
    unknowns: Vec<String>,
    parameters: Vec<RawParameter>,
    relations: Vec<String>,
    classification: Classification,
    notes: Vec<String>,
    citations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    variants: Vec<RawVariant>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reference_forms: Vec<RawReference>,
}

fn valid_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn invalid(id: u32, location: impl Into<String>, message: impl fmt::Display) -> CatalogError {
    CatalogError::Invalid { id, location: location.into(), message: message.to_string() }
}

fn convert(raw: RawProblem) -> Result<ProblemSpec, CatalogError> {
    let id = raw.id;
    if !(1..=PROBLEM_COUNT).contains(&id) {
        return Err(invalid(id, "id", format!("must lie in 1..={PROBLEM_COUNT}")));
    }
    let mut kinds: BTreeMap<String, SymbolKind> = BTreeMap::new();
    for (i, u) in raw.unknowns.iter().enumerate() {
        if !valid_symbol(u) || kinds.insert(u.clone(), SymbolKind::Variable).is_some() {
            return Err(invalid(id, format!("unknowns[{i}]"), format!("bad or repeated name `{u}`")));
        }
    }
    let mut parameters = Vec::new();
    for (i, p) in raw.parameters.iter().enumerate() {
        if !valid_symbol(&p.name) || kinds.insert(p.name.clone(), SymbolKind::Parameter).is_some() {
            return Err(invalid(id, format!("parameters[{i}]"), format!("bad or repeated name `{}`", p.name)));
        }
        let default = match &p.default {
            Some(s) => Some(arith::parse_rational(s).map_err(|e| invalid(id, format!("parameters[{i}].default"), e))?),
            None => None,
        };
        parameters.push(Parameter { name: p.name.clone(), default });
    }
    let resolve = |s: &str| kinds.get(s).copied();
    let parse_all = |rels: &[String], at: &str| -> Result<Vec<Relation>, CatalogError> {
        rels.iter()
            .enumerate()
            .map(|(i, r)| sexpr::parse_relation(r, &resolve).map_err(|e| invalid(id, format!("{at}[{i}]"), e)))
            .collect()
    };
    let relations = parse_all(&raw.relations, "relations")?;
    match raw.classification {
        Classification::Missing if !relations.is_empty() => {
            return Err(invalid(id, "relations", "missing entries carry no relations"));
        }
        Classification::Missing => {}
        _ if relations.is_empty() => return Err(invalid(id, "relations", "stated problems need relations")),
        _ => {}
    }
    let mut variants = Vec::new();
    for (i, v) in raw.variants.iter().enumerate() {
        variants.push(Variant {
            name: v.name.clone(),
            description: v.description.clone(),
            relations: parse_all(&v.relations, &format!("variants[{i}].relations"))?,
        });
    }
    let mut reference_forms = Vec::new();
    for (i, r) in raw.reference_forms.iter().enumerate() {
        let var = r.variable.clone();
        let resolve_ref = |s: &str| {
            if s == var {
                Some(SymbolKind::Variable)
            } else {
                kinds.get(s).filter(|k| **k == SymbolKind::Parameter).copied()
            }
        };
        let expr = sexpr::parse_expr(&r.expr, &resolve_ref)
            .map_err(|e| invalid(id, format!("reference_forms[{i}].expr"), e))?;
        if let Some(claim) = &r.discriminant_claim {
            if !["negative", "zero", "positive"].contains(&claim.as_str()) {
                return Err(invalid(id, format!("reference_forms[{i}].discriminant_claim"), "expected negative, zero or positive"));
            }
        }
        reference_forms.push(ReferenceForm {
            label: r.label.clone(),
            variable: var.clone(),
            expr,
            discriminant_claim: r.discriminant_claim.clone(),
        });
    }
    Ok(ProblemSpec {
        id,
        title: raw.title,
        prose: raw.prose,
        unknowns: raw.unknowns,
        parameters,
        relations,
        classification: raw.classification,
        notes: raw.notes,
        citations: raw.citations,
        variants,
        reference_forms,
    })
}

fn to_raw(p: &ProblemSpec) -> RawProblem {
    let rels = |rs: &[Relation]| rs.iter().map(sexpr::relation_to_sexpr).collect::<Vec<_>>();
    RawProblem {
        id: p.id,
        title: p.title.clone(),
        prose: p.prose.clone(),
        unknowns: p.unknowns.clone(),
        parameters: p
            .parameters
            .iter()
            .map(|q| RawParameter { name: q.name.clone(), default: q.default.as_ref().map(arith::format_rational) })
            .collect(),
        relations: rels(&p.relations),
        classification: p.classification,
        notes: p.notes.clone(),
        citations: p.citations.clone(),
        variants: p
            .variants
            .iter()
            .map(|v| RawVariant { name: v.name.clone(), description: v.description.clone(), relations: rels(&v.relations) })
            .collect(),
        reference_forms: p
            .reference_forms
            .iter()
            .map(|r| RawReference {
                label: r.label.clone(),
                variable: r.variable.clone(),
                expr: sexpr::expr_to_sexpr(&r.expr),
                discriminant_claim: r.discriminant_claim.clone(),
            })
            .collect(),
    }
}

pub fn load_catalog(mut source: impl Read) -> Result<Catalog, CatalogError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_catalog(&text)
}

pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let raw: RawCatalog = serde_json::from_str(text)?;
    let problems = raw.problems.into_iter().map(convert).collect::<Result<Vec<_>, _>>()?;
    let mut seen = BTreeSet::new();
    for p in &problems {
        if !seen.insert(p.id) {
            return Err(CatalogError::DuplicateId(p.id));
        }
    }
    if problems.len() != PROBLEM_COUNT as usize {
        return Err(CatalogError::WrongCount(problems.len()));
    }
    let missing: Vec<u32> =
        problems.iter().filter(|p| p.classification == Classification::Missing).map(|p| p.id).collect();
    let mut sorted_missing = missing.clone();
    sorted_missing.sort_unstable();
    if sorted_missing != MISSING_IDS {
        return Err(CatalogError::MissingSet(sorted_missing));
    }
    let mut problems = problems;
    problems.sort_by_key(|p| p.id);
    Ok(Catalog { version: raw.version, problems })
}

pub fn load_catalog_path(path: &Path) -> Result<Catalog, CatalogError> {
    load_catalog(std::fs::File::open(path)?)
}

/// The catalog shipped inside the binary.
pub fn default_catalog() -> Catalog {
    parse_catalog(BUNDLED).expect("bundled catalog is valid")
}

pub fn bundled_catalog_text() -> &'static str {
    BUNDLED
}

/// Serializes back to the on-disk JSON format.
pub fn to_json(c: &Catalog) -> String {
    let raw = RawCatalog { version: c.version.clone(), problems: c.problems.iter().map(to_raw).collect() };
    let mut s = serde_json::to_string_pretty(&raw).expect("catalog serializes");
    s.push('\n');
    s
}

pub fn get_problem(c: &Catalog, id: u32) -> Result<&ProblemSpec, CatalogError> {
    if !(1..=PROBLEM_COUNT).contains(&id) {
        return Err(CatalogError::OutOfRange(id));
    }
    c.problems.iter().find(|p| p.id == id).ok_or(CatalogError::OutOfRange(id))
}

pub fn list_problems(c: &Catalog, filter: Option<Classification>) -> Vec<&ProblemSpec> {
    c.problems.iter().filter(|p| filter.is_none_or(|f| p.classification == f)).collect()
}

impl ProblemSpec {
    pub fn is_missing(&self) -> bool {
        self.classification == Classification::Missing
    }

    pub fn parameter_names(&self) -> Vec<&str> {
        self.parameters.iter().map(|p| p.name.as_str()).collect()
    }

    /// Copy of this entry with the named variant's relations in place of the
    /// default ones.
    pub fn with_variant(&self, name: &str) -> Result<ProblemSpec, CatalogError> {
        let v = self
            .variants
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| CatalogError::UnknownVariant { id: self.id, name: name.to_string() })?;
        let mut out = self.clone();
        out.relations = v.relations.clone();
        out.notes.push(format!("variant `{}`: {}", v.name, v.description));
        Ok(out)
    }

    /// Catalog defaults overridden by `overrides`. Names that are not
    /// parameters of this problem are rejected. Parameters without a value
    /// stay unbound.
    pub fn bindings(&self, overrides: &Assignment) -> Result<Assignment, CatalogError> {
        let mut out = Assignment::new();
        for p in &self.parameters {
            if let Some(d) = &p.default {
                out.set(&p.name, d.clone());
            }
        }
        for (k, v) in overrides.iter() {
            if !self.parameters.iter().any(|p| &p.name == k) {
                return Err(CatalogError::UnknownParameter { id: self.id, name: k.clone() });
            }
            out.set(k, v.clone());
        }
        Ok(out)
    }

    pub fn unbound_parameters(&self, bindings: &Assignment) -> Vec<String> {
        self.parameters.iter().filter(|p| bindings.get(&p.name).is_none()).map(|p| p.name.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::eval;

    fn ids(ps: &[&ProblemSpec]) -> Vec<u32> {
        ps.iter().map(|p| p.id).collect()
    }

    #[test]
    fn bundled_loads() {
        let c = default_catalog();
        assert_eq!(c.problems.len(), 33);
        assert_eq!(c.problems.iter().filter(|p| !p.relations.is_empty()).count(), 31);
        assert_eq!(get_problem(&c, 28).unwrap().classification, Classification::Degree3);
        let p24 = get_problem(&c, 24).unwrap();
        assert!(p24.is_missing());
        assert!(p24.notes.iter().any(|n| n.contains("al-ʿĀmilī")));
        assert!(get_problem(&c, 0).is_err());
        assert!(get_problem(&c, 34).is_err());
    }

    #[test]
    fn problem_one_relations() {
        let c = default_catalog();
        let p = get_problem(&c, 1).unwrap();
        let text: Vec<String> = p.relations.iter().map(|r| r.to_string()).collect();
        assert_eq!(text, ["isSquare(x^2 + y^2)", "isSquare(x^2 - y^2)"]);
    }

    #[test]
    fn filters() {
        let c = default_catalog();
        assert_eq!(ids(&list_problems(&c, Some(Classification::Congruence))), [1, 18, 19]);
        assert_eq!(ids(&list_problems(&c, Some(Classification::Multiplicative))), [10, 30, 31]);
        assert_eq!(ids(&list_problems(&c, Some(Classification::Degree3))), [15, 21, 22, 25, 28, 29, 32, 33]);
        assert_eq!(list_problems(&c, None).len(), 33);
    }

    #[test]
    fn problem_twenty_once_with_note() {
        let c = default_catalog();
        let p = get_problem(&c, 20).unwrap();
        assert!(p.notes.iter().any(|n| n.contains("twice")));
        assert!(p.with_variant("root_of_root").is_ok());
    }

    #[test]
    fn round_trip() {
        let c = default_catalog();
        let again = parse_catalog(&to_json(&c)).unwrap();
        assert_eq!(again, c);
    }

    fn mutate(f: impl FnOnce(&mut serde_json::Value)) -> Result<Catalog, CatalogError> {
        let mut v: serde_json::Value = serde_json::from_str(BUNDLED).unwrap();
        f(&mut v);
        parse_catalog(&v.to_string())
    }

    #[test]
    fn duplicate_id_rejected() {
        let r = mutate(|v| v["problems"][3]["id"] = 3.into());
        assert!(matches!(r, Err(CatalogError::DuplicateId(3))), "{r:?}");
    }

    #[test]
    fn undeclared_symbol_rejected() {
        let r = mutate(|v| v["problems"][2]["relations"][0] = "(= (+ x w) 1)".into());
        let err = r.unwrap_err();
        assert!(matches!(err, CatalogError::Invalid { id: 3, .. }));
        assert!(err.to_string().contains("`w`"), "{err}");
    }

    #[test]
    fn unknown_field_and_count_rejected() {
        assert!(matches!(mutate(|v| v["problems"][0]["extra"] = 1.into()), Err(CatalogError::Schema(_))));
        let r = mutate(|v| {
            v["problems"].as_array_mut().unwrap().pop();
        });
        assert!(matches!(r, Err(CatalogError::WrongCount(32))));
    }

    #[test]
    fn bindings_merge_defaults() {
        let c = default_catalog();
        let p18 = get_problem(&c, 18).unwrap();
        assert_eq!(p18.bindings(&Assignment::new()).unwrap().get("n"), Some(&arith::int(10)));
        let b = p18.bindings(&Assignment::new().with("n", arith::int(5))).unwrap();
        assert_eq!(b.get("n"), Some(&arith::int(5)));
        assert!(p18.bindings(&Assignment::new().with("q", arith::int(1))).is_err());
        let p4 = get_problem(&c, 4).unwrap();
        assert_eq!(p4.unbound_parameters(&p4.bindings(&Assignment::new()).unwrap()), ["n"]);
    }

    #[test]
    fn every_relation_evaluates() {
        let c = default_catalog();
        for p in &c.problems {
            let names: Vec<String> =
                p.unknowns.iter().cloned().chain(p.parameters.iter().map(|q| q.name.clone())).collect();
            let mut a = Assignment::new();
            for (i, s) in names.iter().enumerate() {
                a.set(s, arith::ratio(i as i64 + 2, 3).unwrap());
            }
            for r in &p.relations {
                for e in r.exprs() {
                    assert!(eval(e, &a).is_ok(), "problem {} {}", p.id, r);
                }
            }
            for f in &p.reference_forms {
                let mut b = a.clone();
                b.set(&f.variable, arith::int(3));
                assert!(eval(&f.expr, &b).is_ok());
            }
        }
    }
}
