//! Exact verification of solutions, reduction audits and certificates.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, format_rational, Rational};
use crate::catalog::ProblemSpec;
use crate::engines::reduce::{ReductionKind, ReductionTrace};
use crate::expr::{self, Assignment, EvalError};

pub const CERTIFICATE_SCHEMA: &str = "dirham-certificate/1";
pub const ENGINE_VERSION: &str = concat!("dirham ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Undefined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub relation: String,
    pub verdict: Verdict,
    #[serde(with = "opt_rational")]
    pub lhs: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub rhs: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatisfactionReport {
    pub verdicts: Vec<RelationVerdict>,
    pub overall: Verdict,
}

impl SatisfactionReport {
    pub fn from_verdicts(verdicts: Vec<RelationVerdict>) -> Self {
        let overall = if verdicts.iter().any(|v| v.verdict == Verdict::Fails) {
            Verdict::Fails
        } else if verdicts.iter().any(|v| v.verdict == Verdict::Undefined) {
            Verdict::Undefined
        } else {
            Verdict::Holds
        };
        SatisfactionReport { verdicts, overall }
    }

    pub fn holds(&self) -> bool {
        self.overall == Verdict::Holds
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let show = |q: &Option<Rational>| q.as_ref().map_or("undefined".to_string(), format_rational);
            out.push_str(&format!("{}: {} (lhs {}, rhs {})\n", v.relation, v.verdict, show(&v.lhs), show(&v.rhs)));
        }
        out.push_str(&format!("overall: {}\n", self.overall));
        out
    }
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| arith::parse_rational(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

/// Evaluates every relation of `p` at the unknowns in `a` and the parameter
/// values in `bindings`.
pub fn verify_solution(
    p: &ProblemSpec,
    bindings: &Assignment,
    a: &Assignment,
) -> Result<SatisfactionReport, EvalError> {
    let mut all = bindings.clone();
    all.extend(a);
    expr::check_relations(&p.relations, &all)
}

/// Any unknown equal to zero.
pub fn is_degenerate(p: &ProblemSpec, a: &Assignment) -> bool {
    p.unknowns.iter().any(|u| a.get(u).is_some_and(|v| v.is_zero()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    SolutionsFound,
    NoneBelowBound,
    NoRationalSolutionsProved,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::SolutionsFound => "solutions_found",
            Outcome::NoneBelowBound => "none_below_bound",
            Outcome::NoRationalSolutionsProved => "no_rational_solutions_proved",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Unknowns range over `0..=value`.
    Integer,
    /// Unknowns range over reduced fractions of height at most `value`.
    Height,
    /// Denominators up to `value` (congruum search).
    KBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub kind: BoundKind,
    pub value: u64,
    /// The unknowns the bound applies to.
    pub unknowns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub values: Assignment,
    pub degenerate: bool,
}

/// The polynomial behind a rational-root decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub polynomial: String,
    pub variable: String,
    #[serde(with = "arith::serde_rational")]
    pub shift: Rational,
    pub zero_multiplicity: u32,
    pub candidates: Vec<String>,
    pub rational_roots: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub engine_version: String,
    pub problem_id: u32,
    pub engine: String,
    pub parameters: Assignment,
    pub bounds: Option<Bounds>,
    pub outcome: Outcome,
    pub solutions: Vec<SolutionRecord>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Certificate {
    pub fn new(problem_id: u32, engine: &str, parameters: Assignment) -> Self {
        Certificate {
            schema: CERTIFICATE_SCHEMA.to_string(),
            engine_version: ENGINE_VERSION.to_string(),
            problem_id,
            engine: engine.to_string(),
            parameters,
            bounds: None,
            outcome: Outcome::NoneBelowBound,
            solutions: Vec::new(),
            notes: Vec::new(),
            decision: None,
            elapsed_ms: None,
        }
    }

    pub fn nondegenerate(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.solutions.iter().filter(|s| !s.degenerate)
    }

    /// Solutions in canonical order (see [`solution_key`]).
    pub fn sort_solutions(&mut self) {
        self.solutions.sort_by_cached_key(|s| solution_key(&s.values));
        self.solutions.dedup();
    }
}

/// Canonical ordering: largest height first compared, then each value's
/// (height, numerator, denominator) in name order.
pub fn solution_key(a: &Assignment) -> (arith::Integer, Vec<(arith::Integer, arith::Integer, arith::Integer)>) {
    let per: Vec<_> = a.iter().map(|(_, v)| (arith::height(v), v.numer().clone(), v.denom().clone())).collect();
    let max = per.iter().map(|t| t.0.clone()).max().unwrap_or_default();
    (max, per)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown format `{0}` (expected json, md or csv)")]
    UnknownFormat(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl FromStr for Format {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            other => Err(VerifyError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn emit_certificate(c: &Certificate, format: &str) -> Result<String, VerifyError> {
    emit(c, format.parse()?)
}

pub fn emit(c: &Certificate, format: Format) -> Result<String, VerifyError> {
    let mut sorted = c.clone();
    sorted.sort_solutions();
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&sorted).expect("certificate serializes");
            s.push('\n');
            Ok(s)
        }
        Format::Md => Ok(markdown(&sorted)),
        Format::Csv => csv_rows(&sorted),
    }
}

pub fn parse_certificate(json: &str) -> Result<Certificate, serde_json::Error> {
    serde_json::from_str(json)
}

fn names_of(c: &Certificate) -> Vec<String> {
    let mut names: Vec<String> = c.solutions.iter().flat_map(|s| s.values.iter().map(|(k, _)| k.clone())).collect();
    names.sort();
    names.dedup();
    names
}

fn markdown(c: &Certificate) -> String {
    let mut out = format!("## Certificate: problem {} ({})\n\n", c.problem_id, c.engine);
    out.push_str(&format!("- outcome: {}\n", c.outcome));
    out.push_str(&format!("- engine version: {}\n", c.engine_version));
    if !c.parameters.is_empty() {
        out.push_str(&format!("- parameters: {}\n", c.parameters));
    }
    match &c.bounds {
        Some(b) => {
            let kind = match b.kind {
                BoundKind::Integer => "integer",
                BoundKind::Height => "height",
                BoundKind::KBound => "k_bound",
            };
            out.push_str(&format!("- bound: {kind} {} on {}\n", b.value, b.unknowns.join(", ")));
        }
        None => out.push_str("- bound: none (complete method)\n"),
    }
    if let Some(d) = &c.decision {
        out.push_str(&format!("- decision polynomial: {}\n", d.polynomial));
        out.push_str(&format!("- candidates: {}\n", bracket(&d.candidates)));
        out.push_str(&format!("- rational roots: {}\n", bracket(&d.rational_roots)));
        if let Some(disc) = &d.discriminant {
            out.push_str(&format!("- discriminant: {disc}\n"));
        }
    }
    if let Some(ms) = c.elapsed_ms {
        out.push_str(&format!("- elapsed: {ms} ms\n"));
    }
    for n in &c.notes {
        out.push_str(&format!("- note: {n}\n"));
    }
    out.push('\n');
    if c.solutions.is_empty() {
        out.push_str("No solutions.\n");
        return out;
    }
    let names = names_of(c);
    out.push_str(&format!("| height | {} | degenerate |\n", names.join(" | ")));
    out.push_str(&format!("|---|{}---|\n", "---|".repeat(names.len())));
    for s in &c.solutions {
        let (h, _) = solution_key(&s.values);
        let vals: Vec<String> =
            names.iter().map(|n| s.values.get(n).map(format_rational).unwrap_or_default()).collect();
        out.push_str(&format!("| {h} | {} | {} |\n", vals.join(" | "), if s.degenerate { "yes" } else { "no" }));
    }
    out
}

fn bracket(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

fn csv_rows(c: &Certificate) -> Result<String, VerifyError> {
    let names = names_of(c);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["problem_id".to_string(), "engine".to_string(), "outcome".to_string(), "bound".to_string()];
    header.extend(names.iter().cloned());
    header.push("degenerate".to_string());
    w.write_record(&header)?;
    let bound = c.bounds.as_ref().map_or(String::new(), |b| b.value.to_string());
    let prefix = [c.problem_id.to_string(), c.engine.clone(), c.outcome.to_string(), bound];
    if c.solutions.is_empty() {
        let mut row = prefix.to_vec();
        row.extend(names.iter().map(|_| String::new()));
        row.push(String::new());
        w.write_record(&row)?;
    }
    for s in &c.solutions {
        let mut row = prefix.to_vec();
        row.extend(names.iter().map(|n| s.values.get(n).map(format_rational).unwrap_or_default()));
        row.push(s.degenerate.to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| VerifyError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// Uniform rational with numerator in [-50, 50] and denominator in [1, 50].
pub fn sample_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.gen_range(-50..=50);
    let den: i64 = rng.gen_range(1..=50);
    Rational::new(num.into(), den.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub point: String,
    pub check: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityOutcome {
    pub problem_id: u32,
    pub samples: usize,
    pub seed: u64,
    /// Set when the trace needed no squaring and the check also confirmed
    /// that the eliminant vanishes only where the relation holds.
    pub equivalence: bool,
    pub counterexample: Option<Counterexample>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Audits a reduction at `samples` seeded random points.
///
/// Structural identities (back-shift, factored zeros, slack specialization)
/// are checked exactly. Pointwise, the slack eliminant must vanish at every
/// sampled point, with radical values sampled freely and their defining
/// relations carried by slack variables; see [`ReductionTrace`].
pub fn identity_check(t: &ReductionTrace, samples: usize, seed: u64) -> IdentityOutcome {
    let mut out = IdentityOutcome { problem_id: t.problem_id, samples: 0, seed, equivalence: false, counterexample: None };
    let fail = |out: &mut IdentityOutcome, point: String, check: &str| {
        out.counterexample = Some(Counterexample { point, check: check.to_string() });
    };
    if let Err(check) = t.structural_check() {
        fail(&mut out, String::from("(symbolic)"), &check);
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = samples.saturating_mul(200).max(1000);
    let mut attempts = 0;
    let mut equivalence = t.squaring_count == 0 && t.kind == ReductionKind::Roots;
    while out.samples < samples && attempts < cap {
        attempts += 1;
        let probe = match t.kind {
            ReductionKind::Roots => t.probe_roots(&mut rng),
            ReductionKind::SquareCondition => t.probe_square(&mut rng, out.samples % 2 == 1),
        };
        match probe {
            Probe::Rejected => continue,
            Probe::Pass { equivalent } => {
                equivalence &= equivalent;
                out.samples += 1;
            }
            Probe::Fail { point, check } => {
                fail(&mut out, point, check);
                return out;
            }
        }
    }
    if out.samples < samples {
        let got = out.samples;
        fail(&mut out, format!("{got} of {samples} samples after {attempts} attempts"), "sampling exhausted");
        return out;
    }
    out.equivalence = equivalence;
    out
}

pub(crate) enum Probe {
    Rejected,
    Pass { equivalent: bool },
    Fail { point: String, check: &'static str },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_catalog, get_problem};

    fn q(s: &str) -> Rational {
        arith::parse_rational(s).unwrap()
    }

    #[test]
    fn spec_examples() {
        let c = default_catalog();
        let p18 = get_problem(&c, 18).unwrap();
        let b = Assignment::new().with("n", arith::int(5));
        let r = verify_solution(p18, &b, &Assignment::new().with("x", q("41/12"))).unwrap();
        assert!(r.holds());
        assert_eq!(r.verdicts[0].rhs, Some(q("49/12")));
        assert_eq!(r.verdicts[1].rhs, Some(q("31/12")));

        let p27 = get_problem(&c, 27).unwrap();
        let b = Assignment::new().with("n", arith::int(1729));
        let a = Assignment::new().with("x", arith::int(9)).with("y", arith::int(10));
        assert!(verify_solution(p27, &b, &a).unwrap().holds());

        let p1 = get_problem(&c, 1).unwrap();
        let a = Assignment::new().with("x", arith::int(1)).with("y", arith::int(1));
        let r = verify_solution(p1, &Assignment::new(), &a).unwrap();
        assert_eq!(r.overall, Verdict::Fails);
        assert_eq!(r.verdicts[0].verdict, Verdict::Fails);
        assert_eq!(r.verdicts[1].verdict, Verdict::Holds);
    }

    #[test]
    fn missing_symbol_is_an_error() {
        let c = default_catalog();
        let p1 = get_problem(&c, 1).unwrap();
        let a = Assignment::new().with("x", arith::int(1));
        assert!(verify_solution(p1, &Assignment::new(), &a).is_err());
    }

    fn sample_certificate() -> Certificate {
        let mut c = Certificate::new(27, "search_integer", Assignment::new().with("n", arith::int(1729)));
        c.bounds = Some(Bounds { kind: BoundKind::Integer, value: 13, unknowns: vec!["x".into()] });
        c.outcome = Outcome::SolutionsFound;
        for (x, y) in [(9, 10), (1, 12)] {
            c.solutions.push(SolutionRecord {
                values: Assignment::new().with("x", arith::int(x)).with("y", arith::int(y)),
                degenerate: false,
            });
        }
        c
    }

    #[test]
    fn json_round_trip() {
        let c = sample_certificate();
        let text = emit_certificate(&c, "json").unwrap();
        let mut back = parse_certificate(&text).unwrap();
        let mut sorted = c.clone();
        sorted.sort_solutions();
        assert_eq!(back, sorted);
        back.elapsed_ms = Some(3);
        let again = parse_certificate(&emit(&back, Format::Json).unwrap()).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn markdown_sorted_by_height() {
        let md = emit_certificate(&sample_certificate(), "md").unwrap();
        let first = md.find("| 10 | 9 | 10 |").unwrap();
        let second = md.find("| 12 | 1 | 12 |").unwrap();
        assert!(first < second, "{md}");
    }

    #[test]
    fn empty_certificate_carries_bound_and_version() {
        let mut c = Certificate::new(3, "search_integer", Assignment::new());
        c.bounds = Some(Bounds { kind: BoundKind::Integer, value: 100, unknowns: vec!["x".into(), "y".into()] });
        let json = emit_certificate(&c, "json").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["outcome"], "none_below_bound");
        assert_eq!(v["bounds"]["value"], 100);
        assert_eq!(v["engine_version"], ENGINE_VERSION);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let out = emit_certificate(&sample_certificate(), "csv").unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "problem_id,engine,outcome,bound,x,y,degenerate");
        assert_eq!(lines[1], "27,search_integer,solutions_found,13,9,10,false");
        assert!(matches!(emit_certificate(&sample_certificate(), "xml"), Err(VerifyError::UnknownFormat(_))));
    }
}
