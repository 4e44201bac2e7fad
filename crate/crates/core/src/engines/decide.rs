//! Exact decisions over the rationals from a reduction trace.

use num_traits::{One, Zero};

use super::reduce::{discriminant_verdict, reduce_problem, ReductionKind, ReductionTrace};
use super::search::{rationals_up_to, search_rational};
use super::{generators, require_bound, EngineError};
use crate::arith::{self, format_rational, Rational};
use crate::catalog::ProblemSpec;
use crate::expr::{eval, Assignment, Expr, Relation};
use crate::poly::cubic_classify;
use crate::verify::{is_degenerate, solution_key, verify_solution, Certificate, Decision, Outcome, SolutionRecord};

/// Height of the fallback search when a square condition has no conic family.
pub const FALLBACK_HEIGHT: u64 = 30;
/// Height of the parameters `t` used to list members of a conic family.
const FAMILY_HEIGHT: u64 = 6;
const FAMILY_SHOWN: usize = 8;

/// Decides whether the problem has a nondegenerate rational solution.
///
/// For an equation reducible to one polynomial the answer is complete: the
/// rational root theorem leaves finitely many candidates and each is checked
/// against the original relations.
pub fn decide_rational(p: &ProblemSpec, bindings: &Assignment) -> Result<Certificate, EngineError> {
    require_bound(p, bindings)?;
    let trace = match reduce_problem(p, bindings) {
        Ok(t) => t,
        Err(EngineError::NotReducible { .. }) if product_of_cubes_shape(p).is_some() => {
            return decide_product(p, bindings);
        }
        Err(e) => return Err(e),
    };
    let mut cert = match trace.kind {
        ReductionKind::Roots => decide_roots(p, bindings, &trace)?,
        ReductionKind::SquareCondition => decide_square(p, bindings, &trace)?,
    };
    cert.sort_solutions();
    Ok(cert)
}

fn record(p: &ProblemSpec, bindings: &Assignment, a: Assignment) -> Option<SolutionRecord> {
    let ok = verify_solution(p, bindings, &a).ok()?.holds();
    ok.then(|| SolutionRecord { degenerate: is_degenerate(p, &a), values: a })
}

fn outcome_for(cert: &Certificate, otherwise: Outcome) -> Outcome {
    if cert.nondegenerate().next().is_some() {
        Outcome::SolutionsFound
    } else {
        otherwise
    }
}

fn decide_roots(p: &ProblemSpec, bindings: &Assignment, t: &ReductionTrace) -> Result<Certificate, EngineError> {
    let poly = t
        .result_polynomial()
        .ok_or_else(|| EngineError::NotReducible { id: p.id, reason: "result is not univariate".into() })?;
    let mut cert = Certificate::new(p.id, "decide_rational", bindings.clone());
    let candidates = poly.rational_root_candidates()?;
    let roots = poly.rational_roots()?;

    let mut values: Vec<Rational> = roots.iter().map(|r| r - &t.shift).collect();
    if t.zero_multiplicity > 0 {
        values.push(Rational::zero());
    }
    let mut spurious = Vec::new();
    for u in &values {
        match t.back_map(u).and_then(|a| record(p, bindings, a)) {
            Some(s) => cert.solutions.push(s),
            None => spurious.push(format!("{} = {}", t.variable, format_rational(u))),
        }
    }

    let disc = poly.discriminant();
    cert.decision = Some(Decision {
        polynomial: t.render_result(),
        variable: t.result_variable.clone(),
        shift: t.shift.clone(),
        zero_multiplicity: t.zero_multiplicity,
        candidates: candidates.iter().map(format_rational).collect(),
        rational_roots: roots.iter().map(format_rational).collect(),
        discriminant: disc.as_ref().map(format_rational),
    });

    cert.notes.push(format!("solution map: {}", t.solution_map));
    if t.zero_multiplicity > 0 {
        cert.notes.push(format!("eliminant = {} * ({})", t.render_zero_factor(), t.render_factored()));
    }
    if candidates.is_empty() {
        cert.notes.push(format!("{} has no rational root candidates", t.render_result()));
    } else {
        cert.notes.push(format!(
            "{} candidate(s) from the rational root theorem, {} root(s)",
            candidates.len(),
            roots.len()
        ));
    }
    for s in &spurious {
        cert.notes.push(format!("{s} fails the original relations (introduced by squaring)"));
    }
    if poly.degree() == Some(3) && poly.coeff(2).is_zero() {
        let m = poly.monic();
        let c = cubic_classify(&m.coeff(1), &m.coeff(0));
        cert.notes.push(format!("discriminant {}: {}", format_rational(&c.discriminant), c.root_structure));
    }
    for form in &p.reference_forms {
        if let Some(claim) = form.discriminant_claim.as_deref() {
            if let Some(v) = discriminant_verdict(t, Some(claim)) {
                cert.notes.push(format!(
                    "claimed {} discriminant for {}: {} (actual {}, {})",
                    claim,
                    form.label,
                    v.verdict.as_deref().unwrap_or(""),
                    v.discriminant,
                    v.sign
                ));
            }
        }
    }
    if poly.degree() == Some(4) && poly.coeff(3).is_zero() {
        match poly.ferrari_factor()? {
            Some((a, b)) => cert.notes.push(format!(
                "splits over Q as ({}) ({})",
                a.render(&t.result_variable),
                b.render(&t.result_variable)
            )),
            None => cert.notes.push(format!(
                "resolvent {} gives no rational splitting",
                poly.ferrari_resolvent()?.render("m")
            )),
        }
    }
    for e in &t.eliminations {
        if divides_by_unknown(&e.expr, p) {
            cert.notes.push(format!("assumes the divisor in {} = {} is nonzero", e.unknown, e.expr));
        }
    }
    cert.outcome = outcome_for(&cert, Outcome::NoRationalSolutionsProved);
    Ok(cert)
}

fn divides_by_unknown(e: &Expr, p: &ProblemSpec) -> bool {
    match e {
        Expr::Div(a, b) => p.unknowns.iter().any(|u| b.mentions(u)) || divides_by_unknown(a, p),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => divides_by_unknown(a, p) || divides_by_unknown(b, p),
        Expr::Pow(a, _) | Expr::Root(a, _) => divides_by_unknown(a, p),
        _ => false,
    }
}

fn decide_square(p: &ProblemSpec, bindings: &Assignment, t: &ReductionTrace) -> Result<Certificate, EngineError> {
    let Some((e, d)) = t.conic_family() else {
        let mut cert = search_rational(p, bindings, FALLBACK_HEIGHT, None)?;
        cert.notes.insert(0, format!("{} is not a conic; fell back to a height search", t.render_result()));
        return Ok(cert);
    };
    let mut cert = Certificate::new(p.id, "decide_rational", bindings.clone());
    let two_e = arith::int(2) * &e;
    let mut found = Vec::new();
    for tau in rationals_up_to(FAMILY_HEIGHT) {
        if tau.is_zero() {
            continue;
        }
        let x = (&tau - &d / &tau) / &two_e;
        let u = &x - &t.shift;
        if let Some(s) = t.back_map(&u).and_then(|a| record(p, bindings, a)) {
            found.push(s);
        }
    }
    // integral members first, then the smallest others
    found.sort_by_cached_key(|s| (!s.values.iter().all(|(_, v)| v.is_integer()), solution_key(&s.values)));
    found.dedup();
    found.truncate(FAMILY_SHOWN);
    cert.solutions = found;
    let xv = &t.result_variable;
    cert.notes.push(format!("{} is a square exactly on the family below", t.render_result()));
    cert.notes.push(format!(
        "{xv} = (t - ({})/t)/{}, t rational and nonzero",
        format_rational(&d),
        format_rational(&two_e)
    ));
    cert.notes.push(format!("solution map: {}", t.solution_map));
    cert.outcome = outcome_for(&cert, Outcome::NoRationalSolutionsProved);
    Ok(cert)
}

/// For `u1^3 * u2^3 * ... = rhs` over all unknowns: `rhs`.
fn product_of_cubes_shape(p: &ProblemSpec) -> Option<&Expr> {
    let [Relation::Equals(lhs, rhs)] = p.relations.as_slice() else {
        return None;
    };
    if p.unknowns.iter().any(|u| rhs.mentions(u)) {
        return None;
    }
    let mut factors = Vec::new();
    flatten_product(lhs, &mut factors);
    let mut seen = Vec::new();
    for f in factors {
        let Expr::Pow(base, 3) = f else { return None };
        let Expr::Var(v) = base.as_ref() else { return None };
        seen.push(v.clone());
    }
    seen.sort();
    let mut all = p.unknowns.clone();
    all.sort();
    (seen == all).then_some(rhs)
}

fn flatten_product<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Mul(a, b) => {
            flatten_product(a, out);
            flatten_product(b, out);
        }
        _ => out.push(e),
    }
}

fn decide_product(p: &ProblemSpec, bindings: &Assignment) -> Result<Certificate, EngineError> {
    let rhs = product_of_cubes_shape(p).expect("shape checked by caller");
    let a = eval(rhs, bindings)?.ok_or_else(|| EngineError::not_reducible("right-hand side undefined"))?;
    let mut cert = Certificate::new(p.id, "product_of_cubes", bindings.clone());
    match generators::product_of_cubes(&a) {
        Some((root, _, _)) => {
            let mut sol = Assignment::new();
            for (i, u) in p.unknowns.iter().enumerate() {
                sol.set(u, if i == 0 { root.clone() } else { Rational::one() });
            }
            cert.solutions.extend(record(p, bindings, sol));
            cert.notes.push(format!("{} = {}^3", format_rational(&a), format_rational(&root)));
            cert.notes.push("any split of the cube root into a product of rationals also works".into());
        }
        None => cert.notes.push(format!(
            "{} is not the cube of a rational, but the product of the unknowns would be its cube root",
            format_rational(&a)
        )),
    }
    cert.outcome = outcome_for(&cert, Outcome::NoRationalSolutionsProved);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_catalog, get_problem};

    fn decide(id: u32, bind: &[(&str, &str)]) -> Certificate {
        let c = default_catalog();
        let p = get_problem(&c, id).unwrap();
        let mut b = Assignment::new();
        for (k, v) in bind {
            b.set(k, arith::parse_rational(v).unwrap());
        }
        decide_rational(p, &p.bindings(&b).unwrap()).unwrap()
    }

    fn xs(c: &Certificate, name: &str) -> Vec<String> {
        c.solutions.iter().map(|s| format_rational(s.values.get(name).unwrap())).collect()
    }

    #[test]
    fn cubic_without_rational_roots() {
        let c = decide(21, &[]);
        assert_eq!(c.outcome, Outcome::NoRationalSolutionsProved);
        assert_eq!(xs(&c, "x"), ["0"]);
        assert!(c.solutions[0].degenerate);
        let d = c.decision.unwrap();
        assert_eq!(d.polynomial, "X^3 - X - 1");
        assert_eq!(d.candidates, ["-1", "1"]);
        assert!(d.rational_roots.is_empty());
    }

    #[test]
    fn discriminant_claim_is_refuted() {
        let c = decide(28, &[]);
        assert_eq!(c.decision.as_ref().unwrap().discriminant.as_deref(), Some("758181600"));
        assert!(c.notes.iter().any(|n| n.contains("REFUTES")));
        assert!(c.notes.iter().any(|n| n.contains("three distinct real roots")));
    }

    #[test]
    fn solutions_found_with_parameters() {
        let c = decide(29, &[("a", "12"), ("b", "5")]);
        assert_eq!(c.outcome, Outcome::SolutionsFound);
        assert!(c.solutions.iter().any(|s| s.values.get("x") == Some(&arith::int(3))
            && s.values.get("y") == Some(&arith::int(4))));
    }

    #[test]
    fn conic_family_witnesses() {
        let c = decide(16, &[]);
        assert_eq!(c.outcome, Outcome::SolutionsFound);
        let got = xs(&c, "x");
        for want in ["23", "11", "-13", "-1"] {
            assert!(got.contains(&want.to_string()), "{want} missing from {got:?}");
        }
    }

    #[test]
    fn product_of_cubes() {
        let c = decide(30, &[("a", "216")]);
        assert_eq!(c.outcome, Outcome::SolutionsFound);
        assert_eq!(xs(&c, "x"), ["6"]);
        assert_eq!(decide(30, &[("a", "2")]).outcome, Outcome::NoRationalSolutionsProved);
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let c = default_catalog();
        let p = get_problem(&c, 29).unwrap();
        assert!(matches!(decide_rational(p, &Assignment::new()), Err(EngineError::UnboundParameter { .. })));
    }

    #[test]
    fn every_listed_solution_verifies() {
        let c = default_catalog();
        for (id, bind) in [(15, vec![("n", "24")]), (32, vec![]), (33, vec![("n", "5")]), (17, vec![]), (22, vec![])] {
            let p = get_problem(&c, id).unwrap();
            let mut b = Assignment::new();
            for (k, v) in bind {
                b.set(k, arith::parse_rational(v).unwrap());
            }
            let cert = decide_rational(p, &b).unwrap();
            for s in &cert.solutions {
                assert!(verify_solution(p, &b, &s.values).unwrap().holds(), "problem {id}");
            }
        }
    }
}
