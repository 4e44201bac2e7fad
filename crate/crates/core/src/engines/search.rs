//! Exhaustive bounded searches over integers or rationals of bounded height.

use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::generators::congruum_certificate;
use super::{require_bound, with_pool, EngineError};
use crate::arith::{self, Integer, Rational};
use crate::catalog::ProblemSpec;
use crate::expr::{eval, isolate_power, Assignment, Expr, Relation};
use crate::verify::{is_degenerate, verify_solution, BoundKind, Bounds, Certificate, Outcome, SolutionRecord};

/// All reduced fractions of height at most `h`, ordered by height, then
/// numerator, then denominator. Zero comes first.
pub fn rationals_up_to(h: u64) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for height in 1..=h {
        let mut level = Vec::new();
        for other in 1..=height {
            if other.gcd(&height) != 1 {
                continue;
            }
            // |num| = height, den = other
            level.push((-(height as i64), other));
            level.push((height as i64, other));
            // den = height, |num| = other < height
            if other < height {
                level.push((-(other as i64), height));
                level.push((other as i64, height));
            }
        }
        level.sort();
        level.dedup();
        out.extend(level.into_iter().map(|(n, d)| Rational::new(Integer::from(n), Integer::from(d))));
    }
    out
}

#[derive(Debug, Clone)]
struct Plan {
    free: Vec<String>,
    /// `v^k = e` solved exactly instead of enumerated.
    dependent: Option<(String, u32, Expr)>,
}

fn plan(p: &ProblemSpec) -> Plan {
    if p.unknowns.len() > 1 {
        for v in p.unknowns.iter().rev() {
            for r in &p.relations {
                if let Relation::Equals(l, rr) = r {
                    if let Some((k, e)) = isolate_power(l, rr, v) {
                        let free = p.unknowns.iter().filter(|u| *u != v).cloned().collect();
                        return Plan { free, dependent: Some((v.clone(), k, e)) };
                    }
                }
            }
        }
    }
    Plan { free: p.unknowns.clone(), dependent: None }
}

fn dependent_values(k: u32, value: &Rational, integer: bool) -> Vec<Rational> {
    if k == 1 {
        return vec![value.clone()];
    }
    if k.is_multiple_of(2) && value.is_negative() {
        return Vec::new();
    }
    match arith::rational_kth_root(value, k) {
        Ok(Some(r)) if integer || k % 2 == 1 || r.is_zero() => vec![r],
        Ok(Some(r)) => vec![-r.clone(), r],
        _ => Vec::new(),
    }
}

fn all_hold(rels: &[Relation], a: &Assignment) -> bool {
    rels.iter().all(|r| match fast_holds(r, a) {
        Some(b) => b,
        None => r.holds(a).unwrap_or(false),
    })
}

// Machine-integer evaluation; `None` whenever a value leaves the integers
// or overflows, so the caller falls back to exact rationals.
fn eval_i128(e: &Expr, a: &Assignment) -> Option<i128> {
    match e {
        Expr::Const(q) => q.is_integer().then(|| q.numer().to_i128())?,
        Expr::Var(n) | Expr::Param(n) => {
            let q = a.get(n)?;
            q.is_integer().then(|| q.numer().to_i128())?
        }
        Expr::Add(l, r) => eval_i128(l, a)?.checked_add(eval_i128(r, a)?),
        Expr::Sub(l, r) => eval_i128(l, a)?.checked_sub(eval_i128(r, a)?),
        Expr::Mul(l, r) => eval_i128(l, a)?.checked_mul(eval_i128(r, a)?),
        Expr::Div(l, r) => {
            let (x, y) = (eval_i128(l, a)?, eval_i128(r, a)?);
            (y != 0 && x % y == 0).then(|| x / y)
        }
        Expr::Pow(b, k) => eval_i128(b, a)?.checked_pow(*k),
        Expr::Root(..) => None,
    }
}

fn is_square_i128(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let mut r = (v as f64).sqrt() as i128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r * r == v
}

fn fast_holds(r: &Relation, a: &Assignment) -> Option<bool> {
    match r {
        Relation::Equals(l, rr) => Some(eval_i128(l, a)? == eval_i128(rr, a)?),
        Relation::Greater(l, rr) => Some(eval_i128(l, a)? > eval_i128(rr, a)?),
        Relation::IsSquare(e) => {
            let v = eval_i128(e, a)?;
            (v.unsigned_abs() < 1u128 << 100).then(|| is_square_i128(v))
        }
        Relation::IsCube(_) => None,
    }
}

fn enumerate(
    p: &ProblemSpec,
    bindings: &Assignment,
    plan: &Plan,
    domain: &[Rational],
    integer: bool,
    threads: Option<usize>,
) -> Vec<SolutionRecord> {
    let rest = plan.free.len().saturating_sub(1);
    let chunks: Vec<Vec<SolutionRecord>> = with_pool(threads, || {
        domain
            .par_iter()
            .map(|first| {
                let mut found = Vec::new();
                let mut a = bindings.clone();
                if let Some(name) = plan.free.first() {
                    a.set(name, first.clone());
                }
                let mut idx = vec![0usize; rest];
                loop {
                    for (j, &i) in idx.iter().enumerate() {
                        a.set(&plan.free[j + 1], domain[i].clone());
                    }
                    visit(p, plan, &mut a, integer, &mut found);
                    // odometer step
                    let mut j = rest;
                    loop {
                        if j == 0 {
                            return found;
                        }
                        j -= 1;
                        idx[j] += 1;
                        if idx[j] < domain.len() {
                            break;
                        }
                        idx[j] = 0;
                    }
                }
            })
            .collect()
    });
    let mut out: Vec<SolutionRecord> = chunks.into_iter().flatten().collect();
    out.retain(|s| verify_solution(p, bindings, &s.values).is_ok_and(|r| r.holds()));
    out
}

fn visit(p: &ProblemSpec, plan: &Plan, a: &mut Assignment, integer: bool, found: &mut Vec<SolutionRecord>) {
    let candidates = match &plan.dependent {
        None => vec![None],
        Some((v, k, e)) => {
            let Ok(Some(value)) = eval(e, a) else { return };
            dependent_values(*k, &value, integer)
                .into_iter()
                .filter(|r| !integer || (r.is_integer() && !r.is_negative()))
                .map(|r| Some((v, r)))
                .collect()
        }
    };
    for c in candidates {
        if let Some((v, r)) = &c {
            a.set(v, r.clone());
        }
        if all_hold(&p.relations, a) {
            let mut values = Assignment::new();
            for u in &p.unknowns {
                if let Some(x) = a.get(u) {
                    values.set(u, x.clone());
                }
            }
            found.push(SolutionRecord { degenerate: is_degenerate(p, &values), values });
        }
    }
}

fn finish(mut cert: Certificate, plan: &Plan, solutions: Vec<SolutionRecord>) -> Certificate {
    cert.solutions = solutions;
    cert.sort_solutions();
    if let Some((v, k, e)) = &plan.dependent {
        let lhs = if *k == 1 { v.clone() } else { format!("{v}^{k}") };
        cert.notes.push(format!("{v} is solved exactly from {lhs} = {e}, not bounded"));
    }
    if cert.solutions.iter().any(|s| s.degenerate) {
        cert.notes.push("solutions with an unknown equal to 0 are degenerate and do not count".into());
    }
    cert.outcome = if cert.nondegenerate().next().is_some() { Outcome::SolutionsFound } else { Outcome::NoneBelowBound };
    cert
}

fn check_size(free: usize, per_axis: usize) -> Result<(), EngineError> {
    let total = (per_axis as u128).checked_pow(free as u32);
    match total {
        Some(n) if n <= 1u128 << 40 => Ok(()),
        _ => Err(EngineError::InvalidBound(format!("{per_axis}^{free} points is too many"))),
    }
}

/// Every nonnegative integer point with free unknowns in `0..=bound`.
pub fn search_integer(
    p: &ProblemSpec,
    bindings: &Assignment,
    bound: u64,
    threads: Option<usize>,
) -> Result<Certificate, EngineError> {
    require_bound(p, bindings)?;
    let plan = plan(p);
    check_size(plan.free.len(), bound as usize + 1)?;
    let domain: Vec<Rational> = (0..=bound).map(|i| Rational::from_integer(Integer::from(i))).collect();
    let found = enumerate(p, bindings, &plan, &domain, true, threads);
    let mut cert = Certificate::new(p.id, "search_integer", bindings.clone());
    cert.bounds = Some(Bounds { kind: BoundKind::Integer, value: bound, unknowns: plan.free.clone() });
    Ok(finish(cert, &plan, found))
}

/// Every rational point with free unknowns of height at most `height`.
pub fn search_rational(
    p: &ProblemSpec,
    bindings: &Assignment,
    height: u64,
    threads: Option<usize>,
) -> Result<Certificate, EngineError> {
    require_bound(p, bindings)?;
    let plan = plan(p);
    let domain = rationals_up_to(height);
    check_size(plan.free.len(), domain.len())?;
    let found = enumerate(p, bindings, &plan, &domain, false, threads);
    let mut cert = Certificate::new(p.id, "search_rational", bindings.clone());
    cert.bounds = Some(Bounds { kind: BoundKind::Height, value: height, unknowns: plan.free.clone() });
    Ok(finish(cert, &plan, found))
}

/// For one unknown `x` with exactly `isSquare(x^2 + c)` and
/// `isSquare(x^2 - c)`, `c` a positive integer: `c`.
pub fn congruum_shape(p: &ProblemSpec, bindings: &Assignment) -> Option<u64> {
    let [x] = p.unknowns.as_slice() else { return None };
    let [Relation::IsSquare(a), Relation::IsSquare(b)] = p.relations.as_slice() else {
        return None;
    };
    let split = |e: &Expr| -> Option<(bool, Expr)> {
        let (plus, base, c) = match e {
            Expr::Add(l, r) => (true, l, r),
            Expr::Sub(l, r) => (false, l, r),
            _ => return None,
        };
        let is_square = matches!(base.as_ref(), Expr::Pow(v, 2) if matches!(v.as_ref(), Expr::Var(n) if n == x));
        (is_square && !c.mentions(x)).then(|| (plus, c.as_ref().clone()))
    };
    let (pa, ca) = split(a)?;
    let (pb, cb) = split(b)?;
    if pa == pb || ca != cb {
        return None;
    }
    let c = eval(&ca, bindings).ok()??;
    if !c.is_integer() || !c.is_positive() {
        return None;
    }
    c.to_integer().to_u64()
}

/// Congruum search on a problem of the shape accepted by [`congruum_shape`].
pub fn congruence_search(p: &ProblemSpec, bindings: &Assignment, k_bound: u64) -> Result<Certificate, EngineError> {
    require_bound(p, bindings)?;
    let n = congruum_shape(p, bindings)
        .ok_or_else(|| EngineError::NotReducible { id: p.id, reason: "not of the form x^2 +- n both square".into() })?;
    Ok(congruum_certificate(p, bindings, n, k_bound))
}
