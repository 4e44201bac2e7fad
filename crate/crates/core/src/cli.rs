//! Command-line front end. `run` never panics on bad input and never writes
//! diagnostics to stdout.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::{self, format_rational, Rational};
use crate::catalog::{self, Catalog, CatalogError, Classification, ProblemSpec};
use crate::engines::reduce::{compare_reference, discriminant_verdict};
use crate::engines::{self, EngineError, ReductionTrace};
use crate::expr::Assignment;
use crate::verify::{self, identity_check, Certificate, Format, IdentityOutcome, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONE_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CATALOG: i32 = 3;

/// Samples used by the reduction audit in `reduce` and `report`.
pub const AUDIT_SAMPLES: usize = 20;
/// Integer bound of the searches in `report`.
pub const REPORT_BOUND: u64 = 20;

#[derive(Debug, Parser)]
#[command(name = "dirham", version, about = "Exact solver for a catalog of classical equation problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Catalog file to use instead of the bundled one.
    #[arg(long, global = true, env = "DIRHAM_CATALOG", value_name = "PATH")]
    catalog: Option<PathBuf>,
    /// Parameter binding, e.g. `--param n=5` (exact fractions only).
    #[arg(long = "param", global = true, value_name = "NAME=VALUE", value_parser = parse_binding)]
    params: Vec<(String, Rational)>,
    #[arg(long, global = true, default_value = "md", value_parser = parse_format)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for searches (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Use a named variant of the problem's relations.
    #[arg(long, global = true)]
    variant: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog entries.
    List {
        #[arg(long = "class", value_parser = parse_class)]
        class: Option<Classification>,
    },
    /// Show one entry.
    Show { id: u32 },
    /// Reduce to a single polynomial and audit the reduction.
    Reduce { id: u32 },
    /// Decide rational solvability exactly.
    Decide { id: u32 },
    /// Bounded search over integers (`--bound`) or rationals (`--height`).
    Search {
        id: u32,
        #[arg(long, required_unless_present = "height", conflicts_with = "height",
              value_parser = clap::value_parser!(u64).range(1..))]
        bound: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        height: Option<u64>,
    },
    /// Check an assignment against the relations.
    Verify {
        id: u32,
        #[arg(long = "assign", required = true, value_name = "NAME=VALUE", value_parser = parse_binding)]
        assign: Vec<(String, Rational)>,
    },
    /// One dossier per problem.
    Report {
        #[arg(long, required_unless_present = "ids")]
        all: bool,
        ids: Vec<u32>,
    },
}

fn parse_binding(s: &str) -> Result<(String, Rational), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("missing name in `{s}`"));
    }
    let q = arith::parse_rational(v.trim()).map_err(|e| e.to_string())?;
    Ok((k.to_string(), q))
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse::<Format>().map_err(|e| e.to_string())
}

fn parse_class(s: &str) -> Result<Classification, String> {
    s.parse::<Classification>()
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let code = match e {
            CatalogError::OutOfRange(_) | CatalogError::UnknownVariant { .. } | CatalogError::UnknownParameter { .. } => {
                EXIT_USAGE
            }
            _ => EXIT_CATALOG,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<verify::VerifyError> for Failure {
    fn from(e: verify::VerifyError) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let started = Instant::now();
    let result = execute(&cli);
    let code = match result {
        Ok((text, code)) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    };
    let _ = writeln!(stderr, "elapsed: {} ms", started.elapsed().as_millis());
    code
}

fn load(cli: &Cli) -> Result<Catalog, Failure> {
    match &cli.catalog {
        Some(path) => Ok(catalog::load_catalog_path(path)?),
        None => Ok(catalog::default_catalog()),
    }
}

fn problem(cli: &Cli, c: &Catalog, id: u32) -> Result<ProblemSpec, Failure> {
    let p = catalog::get_problem(c, id)?;
    match &cli.variant {
        Some(v) => Ok(p.with_variant(v)?),
        None => Ok(p.clone()),
    }
}

fn overrides(cli: &Cli) -> Assignment {
    let mut a = Assignment::new();
    for (k, v) in &cli.params {
        a.set(k, v.clone());
    }
    a
}

fn threads(cli: &Cli) -> Option<usize> {
    cli.threads.map(|t| t as usize)
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    let c = load(cli)?;
    match &cli.command {
        Command::List { class } => Ok((list(cli, &c, *class)?, EXIT_OK)),
        Command::Show { id } => Ok((show(cli, &problem(cli, &c, *id)?)?, EXIT_OK)),
        Command::Reduce { id } => {
            let p = problem(cli, &c, *id)?;
            let bindings = p.bindings(&overrides(cli))?;
            let t = engines::reduce_problem(&p, &bindings)?;
            let audit = identity_check(&t, AUDIT_SAMPLES, cli.seed);
            let code = if audit.passed() { EXIT_OK } else { EXIT_NONE_FOUND };
            Ok((render_reduction(cli.format, &p, &t, &audit)?, code))
        }
        Command::Decide { id } => {
            let p = problem(cli, &c, *id)?;
            let bindings = p.bindings(&overrides(cli))?;
            let cert = engines::decide_rational(&p, &bindings)?;
            certificate_output(cli, &cert)
        }
        Command::Search { id, bound, height } => {
            let p = problem(cli, &c, *id)?;
            let bindings = p.bindings(&overrides(cli))?;
            let cert = match (bound, height) {
                (Some(b), _) => engines::search_integer(&p, &bindings, *b, threads(cli))?,
                (None, Some(h)) => match engines::congruum_shape(&p, &bindings) {
                    Some(_) => {
                        let mut cert = engines::congruence_search(&p, &bindings, *h)?;
                        cert.notes.insert(0, format!("height {h} read as the denominator bound k <= {h}"));
                        cert
                    }
                    None => engines::search_rational(&p, &bindings, *h, threads(cli))?,
                },
                (None, None) => return Err(Failure::usage("one of --bound or --height is required")),
            };
            certificate_output(cli, &cert)
        }
        Command::Verify { id, assign } => {
            let p = problem(cli, &c, *id)?;
            let bindings = p.bindings(&overrides(cli))?;
            let mut a = Assignment::new();
            for (k, v) in assign {
                if !p.unknowns.contains(k) {
                    return Err(Failure::usage(format!("problem {} has no unknown `{k}`", p.id)));
                }
                a.set(k, v.clone());
            }
            let report = verify::verify_solution(&p, &bindings, &a).map_err(|e| Failure::usage(e.to_string()))?;
            let text = match cli.format {
                Format::Json => pretty(&report),
                Format::Md | Format::Csv => report.render(),
            };
            Ok((text, if report.holds() { EXIT_OK } else { EXIT_NONE_FOUND }))
        }
        Command::Report { all, ids } => {
            let chosen: Vec<ProblemSpec> = if *all {
                c.problems.clone()
            } else {
                ids.iter().map(|id| problem(cli, &c, *id)).collect::<Result<_, _>>()?
            };
            Ok((report(cli, &chosen), EXIT_OK))
        }
    }
}

fn certificate_output(cli: &Cli, cert: &Certificate) -> Result<(String, i32), Failure> {
    let text = verify::emit(cert, cli.format)?;
    let code = if cert.outcome == Outcome::NoneBelowBound { EXIT_NONE_FOUND } else { EXIT_OK };
    Ok((text, code))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn list(cli: &Cli, c: &Catalog, class: Option<Classification>) -> Result<String, Failure> {
    let rows = catalog::list_problems(c, class);
    Ok(match cli.format {
        Format::Json => pretty(&Value::Array(
            rows.iter().map(|p| json!({"id": p.id, "classification": p.classification.as_str(), "title": p.title})).collect(),
        )),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "classification", "title"]).map_err(|e| Failure::usage(e.to_string()))?;
            for p in rows {
                w.write_record([p.id.to_string(), p.classification.to_string(), p.title.clone()])
                    .map_err(|e| Failure::usage(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::usage(e.to_string()))?).expect("utf-8")
        }
        Format::Md => {
            let mut s = String::from("| id | classification | title |\n|---:|---|---|\n");
            for p in rows {
                let _ = writeln!(s, "| {} | {} | {} |", p.id, p.classification, p.title);
            }
            s
        }
    })
}

fn show(cli: &Cli, p: &ProblemSpec) -> Result<String, Failure> {
    let params: Vec<Value> = p
        .parameters
        .iter()
        .map(|q| json!({"name": q.name, "default": q.default.as_ref().map(format_rational)}))
        .collect();
    match cli.format {
        Format::Json => Ok(pretty(&json!({
            "id": p.id,
            "title": p.title,
            "classification": p.classification.as_str(),
            "prose": p.prose,
            "unknowns": p.unknowns,
            "parameters": params,
            "relations": p.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "notes": p.notes,
            "citations": p.citations,
            "variants": p.variants.iter().map(|v| v.name.clone()).collect::<Vec<_>>(),
        }))),
        Format::Csv => Err(Failure::usage("show supports --format md or json")),
        Format::Md => {
            let mut s = String::new();
            let _ = writeln!(s, "# Problem {}: {}\n", p.id, p.title);
            let _ = writeln!(s, "classification: {}", p.classification);
            if !p.unknowns.is_empty() {
                let _ = writeln!(s, "unknowns: {}", p.unknowns.join(", "));
            }
            for q in &p.parameters {
                match &q.default {
                    Some(d) => {
                        let _ = writeln!(s, "parameter: {} = {}", q.name, format_rational(d));
                    }
                    None => {
                        let _ = writeln!(s, "parameter: {} (set with --param {}=...)", q.name, q.name);
                    }
                }
            }
            let _ = writeln!(s, "\n{}\n", p.prose);
            if !p.relations.is_empty() {
                s.push_str("relations:\n");
                for r in &p.relations {
                    let _ = writeln!(s, "  {r}");
                }
            }
            for v in &p.variants {
                let _ = writeln!(s, "variant {}: {}", v.name, v.description);
            }
            for n in &p.notes {
                let _ = writeln!(s, "note: {n}");
            }
            for c in &p.citations {
                let _ = writeln!(s, "see: {c}");
            }
            Ok(s)
        }
    }
}

fn render_reduction(
    format: Format,
    p: &ProblemSpec,
    t: &ReductionTrace,
    audit: &IdentityOutcome,
) -> Result<String, Failure> {
    let claim = p.reference_forms.iter().find_map(|f| f.discriminant_claim.as_deref());
    let disc = discriminant_verdict(t, claim);
    let refs: Vec<_> = p.reference_forms.iter().map(|f| compare_reference(t, f)).collect();
    match format {
        Format::Json => Ok(pretty(&json!({
            "problem_id": p.id,
            "kind": t.kind,
            "variable": t.variable,
            "steps": t.steps,
            "eliminant": t.render_eliminant(),
            "zero_multiplicity": t.zero_multiplicity,
            "factored": t.render_factored(),
            "shift": format_rational(&t.shift),
            "result": t.render_result(),
            "result_variable": t.result_variable,
            "squarings": t.squaring_count,
            "solution_map": t.solution_map,
            "discriminant": disc,
            "references": refs.iter().map(|r| json!({
                "label": r.label, "printed": r.printed, "stage": r.stage, "verdict": r.verdict()
            })).collect::<Vec<_>>(),
            "audit": audit,
        }))),
        Format::Csv => Err(Failure::usage("reduce supports --format md or json")),
        Format::Md => {
            let mut s = String::new();
            let _ = writeln!(s, "problem {}: {}", p.id, p.title);
            if !t.parameters.is_empty() {
                let _ = writeln!(s, "symbolic parameters: {}", t.parameters.join(", "));
            }
            for (i, st) in t.steps.iter().enumerate() {
                let _ = writeln!(s, "{:>2}. {}: {}  =>  {}", i + 1, st.rule, st.before, st.after);
            }
            let _ = writeln!(s, "eliminant: {}", t.render_eliminant());
            if t.zero_multiplicity > 0 {
                let _ = writeln!(s, "factored: {} (after removing {})", t.render_factored(), t.render_zero_factor());
            }
            if t.result_variable != t.variable {
                let _ = writeln!(s, "shift: {}", t.render_shift());
            }
            let kind = match t.kind {
                engines::ReductionKind::Roots => "= 0",
                engines::ReductionKind::SquareCondition => "is a rational square",
            };
            let _ = writeln!(s, "result: {} {kind}", t.render_result());
            let _ = writeln!(s, "squarings: {}", t.squaring_count);
            let _ = writeln!(s, "solution map: {}", t.solution_map);
            if let Some(d) = &disc {
                let _ = write!(s, "discriminant: {} ({})", d.discriminant, d.sign);
                if let (Some(c), Some(v)) = (&d.claim, &d.verdict) {
                    let _ = write!(s, "; claimed {c}: {v}");
                }
                s.push('\n');
            }
            for r in &refs {
                let _ = writeln!(
                    s,
                    "reference {}: {} {}{}",
                    r.label,
                    r.printed,
                    r.verdict(),
                    r.stage.as_ref().map_or(String::new(), |st| format!(" ({st})"))
                );
            }
            let _ = writeln!(s, "{}", audit_line(audit));
            Ok(s)
        }
    }
}

fn audit_line(a: &IdentityOutcome) -> String {
    match &a.counterexample {
        None => format!(
            "audit: passed ({} samples, seed {}{})",
            a.samples,
            a.seed,
            if a.equivalence { ", equivalence" } else { "" }
        ),
        Some(c) => format!("audit: FAILED at {} ({})", c.point, c.check),
    }
}

fn report(cli: &Cli, problems: &[ProblemSpec]) -> String {
    let mut docs = Vec::new();
    let mut md = String::new();
    for p in problems {
        let (text, value) = dossier(cli, p);
        md.push_str(&text);
        md.push('\n');
        docs.push(value);
    }
    match cli.format {
        Format::Json => pretty(&Value::Array(docs)),
        _ => md,
    }
}

fn dossier(cli: &Cli, p: &ProblemSpec) -> (String, Value) {
    let mut s = String::new();
    let _ = writeln!(s, "## Problem {}: {} [{}]", p.id, p.title, p.classification);
    let mut v = json!({"id": p.id, "title": p.title, "classification": p.classification.as_str()});
    if p.is_missing() {
        for n in &p.notes {
            let _ = writeln!(s, "note: {n}");
        }
        v["notes"] = json!(p.notes);
        return (s, v);
    }
    let mut given = Assignment::new();
    for (k, q) in &cli.params {
        if p.parameters.iter().any(|x| &x.name == k) {
            given.set(k, q.clone());
        }
    }
    let bindings = p.bindings(&given).unwrap_or_default();
    let unbound = p.unbound_parameters(&bindings);
    match engines::reduce_problem(p, &bindings) {
        Ok(t) => {
            let audit = identity_check(&t, AUDIT_SAMPLES, cli.seed);
            let _ = writeln!(s, "eliminant: {}", t.render_eliminant());
            let _ = writeln!(s, "result: {}", t.render_result());
            let _ = writeln!(s, "{}", audit_line(&audit));
            v["eliminant"] = json!(t.render_eliminant());
            v["result"] = json!(t.render_result());
            v["audit"] = json!(audit);
            for f in &p.reference_forms {
                let r = compare_reference(&t, f);
                let _ = writeln!(s, "reference {}: {} {}", r.label, r.printed, r.verdict());
            }
            if unbound.is_empty() {
                match engines::decide_rational(p, &bindings) {
                    Ok(cert) => {
                        summarize(&mut s, &cert);
                        v["certificate"] = json!(cert);
                    }
                    Err(e) => {
                        let _ = writeln!(s, "decide: {e}");
                    }
                }
            } else {
                let _ = writeln!(s, "decide: needs --param {}", unbound.join(", "));
            }
        }
        Err(_) if !unbound.is_empty() => {
            let _ = writeln!(s, "search: needs --param {}", unbound.join(", "));
        }
        Err(_) => {
            let cert = match engines::congruum_shape(p, &bindings) {
                Some(_) => engines::congruence_search(p, &bindings, REPORT_BOUND),
                None => engines::decide_rational(p, &bindings)
                    .or_else(|_| engines::search_integer(p, &bindings, REPORT_BOUND, threads(cli))),
            };
            match cert {
                Ok(cert) => {
                    summarize(&mut s, &cert);
                    v["certificate"] = json!(cert);
                }
                Err(e) => {
                    let _ = writeln!(s, "search: {e}");
                }
            }
        }
    }
    (s, v)
}

fn summarize(s: &mut String, cert: &Certificate) {
    const SHOWN: usize = 10;
    let bound = cert.bounds.as_ref().map_or(String::new(), |b| format!(" (bound {})", b.value));
    let _ = writeln!(s, "{}: {}{}", cert.engine, cert.outcome, bound);
    let proper: Vec<_> = cert.nondegenerate().collect();
    for sol in proper.iter().take(SHOWN) {
        let vals: Vec<String> = sol.values.iter().map(|(k, q)| format!("{k} = {}", format_rational(q))).collect();
        let _ = writeln!(s, "  {}", vals.join(", "));
    }
    if proper.len() > SHOWN {
        let _ = writeln!(s, "  ... {} more", proper.len() - SHOWN);
    }
    let degenerate = cert.solutions.len() - proper.len();
    if degenerate > 0 {
        let _ = writeln!(s, "  {degenerate} degenerate solution(s) not shown");
    }
    for n in &cert.notes {
        let _ = writeln!(s, "  note: {n}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["dirham"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn show_prints_classification() {
        let (code, out, _) = call(&["show", "28"]);
        assert_eq!(code, 0);
        assert!(out.contains("classification: degree3"));
        assert!(out.contains("relations:"));
    }

    #[test]
    fn reduce_ends_with_depressed_cubic() {
        let (code, out, _) = call(&["reduce", "28"]);
        assert_eq!(code, 0);
        assert!(out.contains("result: X^3 - 603X + 2098 = 0"));
        assert!(out.contains("REFUTES"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["search", "18", "--param", "n=10", "--height", "100"]).0, 1);
        assert_eq!(call(&["verify", "18", "--param", "n=5", "--assign", "x=41/12"]).0, 0);
        assert_eq!(call(&["verify", "18", "--param", "n=5", "--assign", "x=41/11"]).0, 1);
        assert_eq!(call(&["verify", "18", "--assign", "x=0.5"]).0, 2);
        assert_eq!(call(&["search", "18", "--bound", "0"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["show", "99"]).0, 2);
        assert_eq!(call(&["decide", "29"]).0, 2);
        assert_eq!(call(&["list", "--catalog", "/nonexistent/catalog.json"]).0, 3);
    }

    #[test]
    fn list_formats() {
        let (_, md, _) = call(&["list", "--class", "multiplicative"]);
        assert_eq!(md.lines().count(), 5);
        let (_, csv, _) = call(&["list", "--format", "csv"]);
        assert_eq!(csv.lines().count(), 34);
        let (_, js, _) = call(&["list", "--format", "json"]);
        let v: Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 33);
    }

    #[test]
    fn missing_entries_report_their_notes() {
        let (code, out, _) = call(&["report", "7", "24"]);
        assert_eq!(code, 0);
        assert!(out.contains("## Problem 7"));
        assert!(out.contains("note:"));
    }
}
