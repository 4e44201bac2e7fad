//! Expression trees, relations and exact evaluation.
//!
//! A root node evaluates only when its argument is an exact k-th power of a
//! rational; otherwise the whole expression is undefined. Undefined is an
//! ordinary outcome of [`eval`], distinct from a missing-symbol error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, format_rational, Rational};
use crate::verify::{RelationVerdict, SatisfactionReport, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(String),
    Param(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Nonnegative integer exponent.
    Pow(Box<Expr>, u32),
    /// Principal k-th root, `k >= 2`.
    Root(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Equals(Expr, Expr),
    IsSquare(Expr),
    IsCube(Expr),
    /// Strict ordering between two quantities (`lhs > rhs`).
    Greater(Expr, Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value bound for symbol `{0}`")]
    MissingSymbol(String),
}

/// Values for variables and parameters, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(
    #[serde(with = "assignment_serde")] pub BTreeMap<String, Rational>,
);

mod assignment_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &format_rational(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let q = arith::parse_rational(&v).map_err(serde::de::Error::custom)?;
                Ok((k, q))
            })
            .collect()
    }
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: Rational) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.0.get(name)
    }

    pub fn extend(&mut self, other: &Assignment) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect();
        f.write_str(&parts.join(", "))
    }
}

// Constructors. These keep call sites in the engines and tests readable.
impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(arith::int(n))
    }
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }
    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }
    pub fn pow(a: Expr, k: u32) -> Expr {
        Expr::Pow(Box::new(a), k)
    }
    pub fn sqrt(a: Expr) -> Expr {
        Expr::Root(Box::new(a), 2)
    }
    pub fn root(a: Expr, k: u32) -> Expr {
        assert!(k >= 2, "root index must be at least 2");
        Expr::Root(Box::new(a), k)
    }

    pub fn is_atomic(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Param(_) | Expr::Root(..) => true,
            Expr::Const(c) => c.is_integer() && !c.is_negative(),
            _ => false,
        }
    }

    /// Names of all variables and parameters occurring in the tree.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) | Expr::Param(n) => {
                out.insert(n.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Pow(a, _) | Expr::Root(a, _) => a.collect_symbols(out),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(n) | Expr::Param(n) => n == name,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            Expr::Pow(a, _) | Expr::Root(a, _) => a.mentions(name),
        }
    }

    pub fn has_root(&self) -> bool {
        match self {
            Expr::Root(..) => true,
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_root() || b.has_root()
            }
            Expr::Pow(a, _) => a.has_root(),
        }
    }

    /// Applies `f` bottom-up to every node.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Add(a, b) => Expr::add(a.map_bottom_up(f), b.map_bottom_up(f)),
            Expr::Sub(a, b) => Expr::sub(a.map_bottom_up(f), b.map_bottom_up(f)),
            Expr::Mul(a, b) => Expr::mul(a.map_bottom_up(f), b.map_bottom_up(f)),
            Expr::Div(a, b) => Expr::div(a.map_bottom_up(f), b.map_bottom_up(f)),
            Expr::Pow(a, k) => Expr::pow(a.map_bottom_up(f), *k),
            Expr::Root(a, k) => Expr::root(a.map_bottom_up(f), *k),
        };
        f(rebuilt)
    }
}

/// Exact value of `e` under `a`; `Ok(None)` when a division by zero occurs or
/// a root argument is not an exact power of a rational.
pub fn eval(e: &Expr, a: &Assignment) -> Result<Option<Rational>, EvalError> {
    Ok(match e {
        Expr::Const(c) => Some(c.clone()),
        Expr::Var(n) | Expr::Param(n) => {
            Some(a.get(n).cloned().ok_or_else(|| EvalError::MissingSymbol(n.clone()))?)
        }
        Expr::Add(x, y) => both(x, y, a)?.map(|(p, q)| p + q),
        Expr::Sub(x, y) => both(x, y, a)?.map(|(p, q)| p - q),
        Expr::Mul(x, y) => both(x, y, a)?.map(|(p, q)| p * q),
        Expr::Div(x, y) => match both(x, y, a)? {
            Some((p, q)) if !q.is_zero() => Some(p / q),
            _ => None,
        },
        Expr::Pow(x, k) => eval(x, a)?.map(|v| num_traits::pow(v, *k as usize)),
        Expr::Root(x, k) => match eval(x, a)? {
            Some(v) if !(v.is_negative() && k % 2 == 0) => {
                arith::rational_kth_root(&v, *k).ok().flatten()
            }
            _ => None,
        },
    })
}

// Both operands are evaluated even when the first is undefined so that a
// missing symbol anywhere in the tree is always reported.
fn both(x: &Expr, y: &Expr, a: &Assignment) -> Result<Option<(Rational, Rational)>, EvalError> {
    let p = eval(x, a)?;
    let q = eval(y, a)?;
    Ok(p.zip(q))
}

/// Replaces every occurrence of the symbol `sym` by `replacement`.
pub fn substitute(e: &Expr, sym: &str, replacement: &Expr) -> Expr {
    e.map_bottom_up(&mut |node| match &node {
        Expr::Var(n) | Expr::Param(n) if n == sym => replacement.clone(),
        _ => node,
    })
}

impl Relation {
    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Relation::Equals(l, r) | Relation::Greater(l, r) => vec![l, r],
            Relation::IsSquare(e) | Relation::IsCube(e) => vec![e],
        }
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.exprs().into_iter().flat_map(|e| e.symbols()).collect()
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.exprs().iter().any(|e| e.mentions(name))
    }

    pub fn map_exprs(&self, mut f: impl FnMut(&Expr) -> Expr) -> Relation {
        match self {
            Relation::Equals(l, r) => Relation::Equals(f(l), f(r)),
            Relation::Greater(l, r) => Relation::Greater(f(l), f(r)),
            Relation::IsSquare(e) => Relation::IsSquare(f(e)),
            Relation::IsCube(e) => Relation::IsCube(f(e)),
        }
    }

    pub fn substitute(&self, sym: &str, replacement: &Expr) -> Relation {
        self.map_exprs(|e| substitute(e, sym, replacement))
    }

    /// Verdict with the evaluated witnesses (`lhs`, `rhs`; for the power
    /// predicates, the value and its root).
    pub fn check(&self, a: &Assignment) -> Result<RelationVerdict, EvalError> {
        let (verdict, lhs, rhs) = match self {
            Relation::Equals(l, r) | Relation::Greater(l, r) => {
                let lv = eval(l, a)?;
                let rv = eval(r, a)?;
                let verdict = match (&lv, &rv) {
                    (Some(x), Some(y)) => {
                        let ok = if matches!(self, Relation::Equals(..)) { x == y } else { x > y };
                        if ok { Verdict::Holds } else { Verdict::Fails }
                    }
                    _ => Verdict::Undefined,
                };
                (verdict, lv, rv)
            }
            Relation::IsSquare(e) | Relation::IsCube(e) => {
                let k = if matches!(self, Relation::IsSquare(_)) { 2 } else { 3 };
                let v = eval(e, a)?;
                match v {
                    None => (Verdict::Undefined, None, None),
                    Some(v) => {
                        let root = if v.is_negative() && k == 2 {
                            None
                        } else {
                            arith::rational_kth_root(&v, k).ok().flatten()
                        };
                        let verdict = if root.is_some() { Verdict::Holds } else { Verdict::Fails };
                        (verdict, Some(v), root)
                    }
                }
            }
        };
        Ok(RelationVerdict { relation: self.to_string(), verdict, lhs, rhs })
    }
}

impl Relation {
    /// Whether the relation holds, without building a report.
    pub fn holds(&self, a: &Assignment) -> Result<bool, EvalError> {
        Ok(match self {
            Relation::Equals(l, r) | Relation::Greater(l, r) => match (eval(l, a)?, eval(r, a)?) {
                (Some(x), Some(y)) => {
                    if matches!(self, Relation::Equals(..)) {
                        x == y
                    } else {
                        x > y
                    }
                }
                _ => false,
            },
            Relation::IsSquare(e) => eval(e, a)?.is_some_and(|v| arith::is_rational_square(&v)),
            Relation::IsCube(e) => eval(e, a)?.is_some_and(|v| matches!(arith::rational_kth_root(&v, 3), Ok(Some(_)))),
        })
    }
}

/// Evaluates every relation; the overall verdict holds iff all hold.
pub fn check_relations(rels: &[Relation], a: &Assignment) -> Result<SatisfactionReport, EvalError> {
    let verdicts = rels.iter().map(|r| r.check(a)).collect::<Result<Vec<_>, _>>()?;
    Ok(SatisfactionReport::from_verdicts(verdicts))
}

/// One additive term of a flattened sum: `sign * term`.
#[derive(Debug, Clone)]
pub struct SignedTerm {
    pub negative: bool,
    pub term: Expr,
}

pub fn additive_terms(e: &Expr) -> Vec<SignedTerm> {
    fn go(e: &Expr, negative: bool, out: &mut Vec<SignedTerm>) {
        match e {
            Expr::Add(a, b) => {
                go(a, negative, out);
                go(b, negative, out);
            }
            Expr::Sub(a, b) => {
                go(a, negative, out);
                go(b, !negative, out);
            }
            _ => out.push(SignedTerm { negative, term: e.clone() }),
        }
    }
    let mut out = Vec::new();
    go(e, false, &mut out);
    out
}

fn sum_of_terms(terms: &[SignedTerm]) -> Expr {
    let mut acc: Option<Expr> = None;
    for t in terms {
        acc = Some(match (acc, t.negative) {
            (None, false) => t.term.clone(),
            (None, true) => Expr::sub(Expr::int(0), t.term.clone()),
            (Some(a), false) => Expr::add(a, t.term.clone()),
            (Some(a), true) => Expr::sub(a, t.term.clone()),
        });
    }
    acc.unwrap_or_else(|| Expr::int(0))
}

/// If `e` is `c * v^k` (with `c` a nonzero constant, possibly absent),
/// returns `(c, k)`.
pub fn pure_power_of(e: &Expr, v: &str) -> Option<(Rational, u32)> {
    match e {
        Expr::Var(n) if n == v => Some((arith::int(1), 1)),
        Expr::Pow(base, k) if *k > 0 => {
            let (c, inner) = pure_power_of(base, v)?;
            Some((num_traits::pow(c, *k as usize), inner * k))
        }
        Expr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Const(c), other) | (other, Expr::Const(c)) if !c.is_zero() => {
                let (c2, k) = pure_power_of(other, v)?;
                Some((c * c2, k))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Solves `lhs = rhs` for `v^k` when `v` occurs in exactly one additive term
/// of the equation and that term is a constant multiple of a power of `v`.
/// Returns `(k, E)` with `v^k = E` and `E` free of `v`.
pub fn isolate_power(lhs: &Expr, rhs: &Expr, v: &str) -> Option<(u32, Expr)> {
    let lt = additive_terms(lhs);
    let rt = additive_terms(rhs);
    let hits: Vec<(bool, usize)> = lt
        .iter()
        .enumerate()
        .filter(|(_, t)| t.term.mentions(v))
        .map(|(i, _)| (true, i))
        .chain(rt.iter().enumerate().filter(|(_, t)| t.term.mentions(v)).map(|(i, _)| (false, i)))
        .collect();
    let [(on_left, idx)] = hits.as_slice() else {
        return None;
    };
    let (same, other) = if *on_left { (&lt, &rt) } else { (&rt, &lt) };
    let target = &same[*idx];
    let (coeff, k) = pure_power_of(&target.term, v)?;
    let rest: Vec<SignedTerm> =
        same.iter().enumerate().filter(|(i, _)| i != idx).map(|(_, t)| t.clone()).collect();
    // target_sign * c * v^k + rest = other  =>  v^k = (other - rest) / (target_sign * c)
    let mut e = sum_of_terms(other);
    if !rest.is_empty() {
        let rest_e = sum_of_terms(&rest);
        e = if matches!(e, Expr::Const(ref c) if c.is_zero()) {
            Expr::sub(Expr::int(0), rest_e)
        } else {
            Expr::sub(e, rest_e)
        };
    }
    let scale = if target.negative { -coeff } else { coeff };
    if scale != arith::int(1) {
        e = Expr::div(e, Expr::Const(scale));
    }
    Some((k, e))
}

/// Coefficient `c` with `term = c * v` and `c` free of `v`.
pub fn linear_coefficient(term: &Expr, v: &str) -> Option<Expr> {
    fn times(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(c), _) if *c == arith::int(1) => b,
            (_, Expr::Const(c)) if *c == arith::int(1) => a,
            _ => Expr::mul(a, b),
        }
    }
    match term {
        Expr::Var(n) if n == v => Some(Expr::int(1)),
        Expr::Mul(a, b) if !b.mentions(v) => Some(times(linear_coefficient(a, v)?, (**b).clone())),
        Expr::Mul(a, b) if !a.mentions(v) => Some(times((**a).clone(), linear_coefficient(b, v)?)),
        Expr::Div(a, b) if !b.mentions(v) => Some(Expr::div(linear_coefficient(a, v)?, (**b).clone())),
        _ => None,
    }
}

// Sum of `plus` minus the sum of `minus`, positive terms first.
fn signed_difference(plus: &[SignedTerm], minus: &[SignedTerm]) -> Expr {
    let mut all: Vec<SignedTerm> = plus
        .iter()
        .cloned()
        .chain(minus.iter().map(|t| SignedTerm { negative: !t.negative, term: t.term.clone() }))
        .filter(|t| !matches!(&t.term, Expr::Const(c) if c.is_zero()))
        .collect();
    all.sort_by_key(|t| t.negative);
    sum_of_terms(&all)
}

/// Solves `lhs = rhs` for `v` when `v` occurs in exactly one additive term
/// and that term is `c * v` with `c` free of `v`. Returns the solution and
/// whether `c` is a constant.
pub fn isolate_linear(lhs: &Expr, rhs: &Expr, v: &str) -> Option<(Expr, bool)> {
    let lt = additive_terms(lhs);
    let rt = additive_terms(rhs);
    let mut hits = lt.iter().enumerate().filter(|(_, t)| t.term.mentions(v)).map(|(i, _)| (true, i));
    let hits_r = rt.iter().enumerate().filter(|(_, t)| t.term.mentions(v)).map(|(i, _)| (false, i));
    let all: Vec<(bool, usize)> = hits.by_ref().chain(hits_r).collect();
    let [(on_left, idx)] = all.as_slice() else {
        return None;
    };
    let (same, other) = if *on_left { (&lt, &rt) } else { (&rt, &lt) };
    let target = &same[*idx];
    let coeff = linear_coefficient(&target.term, v)?;
    let rest: Vec<SignedTerm> =
        same.iter().enumerate().filter(|(i, _)| i != idx).map(|(_, t)| t.clone()).collect();
    let numerator = if target.negative { signed_difference(&rest, other) } else { signed_difference(other, &rest) };
    let constant = coeff.symbols().is_empty();
    let solved = match &coeff {
        Expr::Const(c) if *c == arith::int(1) => numerator,
        _ => Expr::div(numerator, coeff),
    };
    Some((solved, constant))
}

fn fmt_const(c: &Rational) -> String {
    format_rational(c)
}

/// Canonical infix rendering with explicit parentheses around every
/// compound operand (left-nested chains of `+`/`-` and of `*` excepted).
pub fn render(e: &Expr) -> String {
    match e {
        Expr::Const(c) => fmt_const(c),
        Expr::Var(n) | Expr::Param(n) => n.clone(),
        Expr::Add(a, b) => format!("{} + {}", render_chain(a, true), operand(b)),
        Expr::Sub(a, b) => format!("{} - {}", render_chain(a, true), operand(b)),
        Expr::Mul(a, b) => format!("{} * {}", render_chain(a, false), operand(b)),
        Expr::Div(a, b) => format!("{} / {}", operand(a), operand(b)),
        Expr::Pow(a, k) => {
            let base = if matches!(**a, Expr::Var(_) | Expr::Param(_) | Expr::Root(..))
                || matches!(**a, Expr::Const(ref c) if c.is_integer() && !c.is_negative())
            {
                render(a)
            } else {
                format!("({})", render(a))
            };
            format!("{base}^{k}")
        }
        Expr::Root(a, 2) => format!("sqrt({})", render(a)),
        Expr::Root(a, 3) => format!("cbrt({})", render(a)),
        Expr::Root(a, k) => format!("root({k}, {})", render(a)),
    }
}

fn render_chain(e: &Expr, additive: bool) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) if additive => render(e),
        Expr::Mul(..) if !additive => render(e),
        _ => operand(e),
    }
}

fn operand(e: &Expr) -> String {
    if e.is_atomic() || matches!(e, Expr::Pow(..)) {
        render(e)
    } else {
        format!("({})", render(e))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equals(l, r) => write!(f, "{l} = {r}"),
            Relation::Greater(l, r) => write!(f, "{l} > {r}"),
            Relation::IsSquare(e) => write!(f, "isSquare({e})"),
            Relation::IsCube(e) => write!(f, "isCube({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let e = Expr::add(Expr::sqrt(Expr::var("x")), Expr::var("x"));
        let a = Assignment::new().with("x", q("9/4"));
        assert_eq!(eval(&e, &a).unwrap(), Some(q("15/4")));

        let a = Assignment::new().with("x", q("10"));
        assert_eq!(eval(&Expr::sqrt(Expr::var("x")), &a).unwrap(), None);

        let e = Expr::div(Expr::int(1), Expr::sub(Expr::var("x"), Expr::var("y")));
        let a = Assignment::new().with("x", q("3")).with("y", q("3"));
        assert_eq!(eval(&e, &a).unwrap(), None);
    }

    #[test]
    fn missing_symbol_is_an_error_not_undefined() {
        let e = Expr::div(Expr::int(1), Expr::sub(Expr::int(0), Expr::var("z")));
        let err = eval(&Expr::add(Expr::div(Expr::int(1), Expr::int(0)), e), &Assignment::new());
        assert_eq!(err, Err(EvalError::MissingSymbol("z".into())));
    }

    #[test]
    fn negative_radicand_is_undefined_for_even_roots_only() {
        let a = Assignment::new().with("x", q("-8"));
        assert_eq!(eval(&Expr::sqrt(Expr::var("x")), &a).unwrap(), None);
        assert_eq!(eval(&Expr::root(Expr::var("x"), 3), &a).unwrap(), Some(q("-2")));
    }

    #[test]
    fn substitute_examples() {
        let e = Expr::add(Expr::var("x"), Expr::sqrt(Expr::var("x")));
        let x2 = Expr::pow(Expr::var("X"), 2);
        let got = substitute(&e, "x", &x2);
        assert_eq!(got, Expr::add(x2.clone(), Expr::sqrt(x2)));
        assert_eq!(got.to_string(), "X^2 + sqrt(X^2)");

        let ten_minus_x = Expr::sub(Expr::int(10), Expr::var("x"));
        assert_eq!(substitute(&Expr::var("y"), "y", &ten_minus_x), ten_minus_x);

        let c = Expr::Const(q("7/3"));
        assert_eq!(substitute(&c, "x", &Expr::var("anything")), c);
    }

    #[test]
    fn rendering_parenthesizes_compound_operands() {
        let e = Expr::mul(
            Expr::add(Expr::var("x"), Expr::sqrt(Expr::var("x"))),
            Expr::add(Expr::var("y"), Expr::sqrt(Expr::var("y"))),
        );
        assert_eq!(e.to_string(), "(x + sqrt(x)) * (y + sqrt(y))");
        let e = Expr::sub(Expr::var("a"), Expr::sub(Expr::var("b"), Expr::Const(q("-1/2"))));
        assert_eq!(e.to_string(), "a - (b - (-1/2))");
        let e = Expr::pow(Expr::pow(Expr::var("x"), 2), 2);
        assert_eq!(e.to_string(), "(x^2)^2");
        assert_eq!(Expr::root(Expr::var("x"), 3).to_string(), "cbrt(x)");
    }

    #[test]
    fn isolate_power_cases() {
        // x + y = 10  =>  y = 10 - x
        let (k, e) = isolate_power(&Expr::add(Expr::var("x"), Expr::var("y")), &Expr::int(10), "y").unwrap();
        assert_eq!(k, 1);
        assert_eq!(e.to_string(), "10 - x");
        // (x^2)^2 + (y^2)^2 = (z^2)^2  =>  z^4 = ...
        let sq = |n: &str| Expr::pow(Expr::pow(Expr::var(n), 2), 2);
        let (k, e) = isolate_power(&Expr::add(sq("x"), sq("y")), &sq("z"), "z").unwrap();
        assert_eq!(k, 4);
        assert_eq!(e.to_string(), "(x^2)^2 + (y^2)^2");
        // x - y = 10 sqrt(y): y occurs twice
        let lhs = Expr::sub(Expr::var("x"), Expr::var("y"));
        let rhs = Expr::mul(Expr::int(10), Expr::sqrt(Expr::var("y")));
        assert!(isolate_power(&lhs, &rhs, "y").is_none());
        let (_, e) = isolate_power(&lhs, &rhs, "x").unwrap();
        let a = Assignment::new().with("y", q("4"));
        assert_eq!(eval(&e, &a).unwrap(), Some(q("24")));
        // 3 - 2x = 0  =>  x = 3/2
        let (_, e) =
            isolate_power(&Expr::sub(Expr::int(3), Expr::mul(Expr::int(2), Expr::var("x"))), &Expr::int(0), "x")
                .unwrap();
        assert_eq!(eval(&e, &Assignment::new()).unwrap(), Some(q("3/2")));
        // x*y = a: not a pure power
        assert!(isolate_power(&Expr::mul(Expr::var("x"), Expr::var("y")), &Expr::param("a"), "x").is_none());
    }

    #[test]
    fn problem_21_relation_verdicts() {
        let x = || Expr::var("x");
        let rad = || Expr::sub(Expr::pow(x(), 2), x());
        let rel = Relation::Equals(Expr::mul(rad(), Expr::sqrt(rad())), Expr::pow(x(), 2));
        let at = |v: &str| check_relations(std::slice::from_ref(&rel), &Assignment::new().with("x", q(v))).unwrap();
        assert_eq!(at("0").overall, Verdict::Holds);
        assert_eq!(at("2").overall, Verdict::Undefined);
        assert_eq!(at("2").verdicts[0].verdict, Verdict::Undefined);
    }

    #[test]
    fn problem_18_relations_with_n_5() {
        let x2 = || Expr::pow(Expr::var("x"), 2);
        let rels = [
            Relation::IsSquare(Expr::add(x2(), Expr::param("n"))),
            Relation::IsSquare(Expr::sub(x2(), Expr::param("n"))),
        ];
        let a = Assignment::new().with("x", q("41/12")).with("n", q("5"));
        let rep = check_relations(&rels, &a).unwrap();
        assert_eq!(rep.overall, Verdict::Holds);
        assert_eq!(rep.verdicts[0].rhs, Some(q("49/12")));
        assert_eq!(rep.verdicts[1].rhs, Some(q("31/12")));
    }
}
