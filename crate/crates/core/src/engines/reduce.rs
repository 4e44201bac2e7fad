//! Reduction of a radical system to one polynomial in one unknown.
//!
//! Pipeline: substitute bound parameters, eliminate the other unknowns
//! through linear isolations, optionally replace `x` by `X^2` when `x` only
//! appears under a top-level square root, clear denominators, then remove
//! radicals outermost first by isolating and squaring. The polynomial is made
//! monic, stripped of its zero roots and, for cubics and quartics (quadratics
//! for square conditions), depressed by a shift.
//!
//! Each radical `sqrt(N/D)` becomes a variable `r` with `r^2 = N/D` when `D`
//! is constant and `r^2 = N*D` with value `r/D` otherwise. Alongside the main
//! run, a slack run keeps `s = L - R` and `t_j = r_j^2 - R_j` symbolic so the
//! audit in [`crate::verify::identity_check`] can test the elimination at
//! arbitrary points.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::arith::{self, format_rational, Rational};
use crate::catalog::{ProblemSpec, ReferenceForm};
use crate::engines::EngineError;
use crate::expr::{self, eval, isolate_linear, Assignment, Expr, Relation};
use crate::mpoly::MPoly;
use crate::poly::Polynomial;
use crate::verify::{sample_rational, Probe};

pub const MAX_SQUARINGS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Substitute,
    IsolateRadical,
    SquareBothSides,
    ClearDenominators,
    Collect,
    FactorOutUnknown,
    Shift,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Substitute => "substitute",
            Rule::IsolateRadical => "isolate_radical",
            Rule::SquareBothSides => "square_both_sides",
            Rule::ClearDenominators => "clear_denominators",
            Rule::Collect => "collect",
            Rule::FactorOutUnknown => "factor_out_unknown",
            Rule::Shift => "shift",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: Rule,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    /// One equation; solutions are roots of the result.
    Roots,
    /// One square predicate; solutions make the result a rational square.
    SquareCondition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub unknown: String,
    pub expr: Expr,
}

#[derive(Debug, Clone)]
struct Slot {
    radicand: MPoly,
    denom: MPoly,
}

#[derive(Debug, Clone)]
struct Audit {
    slack: MPoly,
    slots: Vec<Slot>,
    roots: Vec<(Expr, usize)>,
    layout: Layout,
}

#[derive(Debug, Clone, Copy)]
struct Layout {
    params: usize,
}

impl Layout {
    fn slack(&self) -> usize {
        self.params + 1
    }
    fn r(&self, j: usize) -> usize {
        self.params + 2 + 2 * j
    }
    fn t(&self, j: usize) -> usize {
        self.params + 3 + 2 * j
    }
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub problem_id: u32,
    pub steps: Vec<Step>,
    pub kind: ReductionKind,
    /// The original unknown the result speaks about.
    pub unknown: String,
    /// Variable of the eliminant (`unknown`, or `X` when `unknown = X^2`).
    pub variable: String,
    pub square_substitution: bool,
    pub eliminations: Vec<Elimination>,
    pub reduced: Relation,
    /// Parameters left symbolic; variable `i + 1` of every polynomial.
    pub parameters: Vec<String>,
    pub bindings: Assignment,
    pub eliminant: MPoly,
    pub zero_multiplicity: u32,
    pub factored: MPoly,
    pub shift: Rational,
    pub result: MPoly,
    pub result_variable: String,
    pub squaring_count: u32,
    pub solution_map: String,
    audit: Audit,
}

struct Converter<'a> {
    vars: &'a BTreeMap<String, usize>,
    layout: Layout,
    slack: bool,
    slots: Vec<Slot>,
    roots: Vec<(Expr, usize)>,
    names: Vec<String>,
}

impl Converter<'_> {
    fn full_radicand(&self, j: usize) -> MPoly {
        let r = &self.slots[j].radicand;
        if self.slack {
            r + &MPoly::var(self.layout.t(j))
        } else {
            r.clone()
        }
    }

    fn reduce(&self, p: &MPoly) -> MPoly {
        let mut p = p.clone();
        for j in (0..self.slots.len()).rev() {
            p = p.reduce_square(self.layout.r(j), &self.full_radicand(j));
        }
        p
    }

    fn normalize(&self, n: MPoly, d: MPoly) -> (MPoly, MPoly) {
        match d.as_constant() {
            Some(c) if !c.is_one() && !c.is_zero() => (n.scale(&c.recip()), MPoly::one()),
            _ => (n, d),
        }
    }

    fn conv(&mut self, e: &Expr) -> Result<(MPoly, MPoly), EngineError> {
        Ok(match e {
            Expr::Const(c) => (MPoly::constant(c.clone()), MPoly::one()),
            Expr::Var(n) | Expr::Param(n) => match self.vars.get(n) {
                Some(&i) => (MPoly::var(i), MPoly::one()),
                None => return Err(EngineError::not_reducible(format!("symbol `{n}` left after elimination"))),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (na, da) = self.conv(a)?;
                let (nb, db) = self.conv(b)?;
                let neg = matches!(e, Expr::Sub(..));
                if da == db {
                    let n = if neg { &na - &nb } else { &na + &nb };
                    (n, da)
                } else {
                    let l = &na * &db;
                    let r = &nb * &da;
                    let n = if neg { &l - &r } else { &l + &r };
                    let d = &da * &db;
                    self.normalize(self.reduce(&n), self.reduce(&d))
                }
            }
            Expr::Mul(a, b) => {
                let (na, da) = self.conv(a)?;
                let (nb, db) = self.conv(b)?;
                self.normalize(self.reduce(&(&na * &nb)), self.reduce(&(&da * &db)))
            }
            Expr::Div(a, b) => {
                let (na, da) = self.conv(a)?;
                let (nb, db) = self.conv(b)?;
                if nb.is_zero() {
                    return Err(EngineError::not_reducible("division by zero in relation"));
                }
                self.normalize(self.reduce(&(&na * &db)), self.reduce(&(&da * &nb)))
            }
            Expr::Pow(a, k) => {
                let (n, d) = self.conv(a)?;
                self.normalize(self.reduce(&n.pow(*k)), self.reduce(&d.pow(*k)))
            }
            Expr::Root(a, k) => {
                if *k != 2 {
                    return Err(EngineError::not_reducible("only square roots are eliminated"));
                }
                let (n, d) = self.conv(a)?;
                if let (Some(nc), Some(dc)) = (n.as_constant(), d.as_constant()) {
                    if let Ok(Some(root)) = arith::rational_kth_root(&(nc / dc), 2) {
                        return Ok((MPoly::constant(root), MPoly::one()));
                    }
                }
                let (radicand, denom) = match d.as_constant() {
                    Some(c) => (n.scale(&c.recip()), MPoly::one()),
                    None => (self.reduce(&(&n * &d)), d),
                };
                let j = match self.slots.iter().position(|s| s.radicand == radicand && s.denom == denom) {
                    Some(j) => j,
                    None => {
                        let name = format!("sqrt({})", radicand.render(&self.names, 0));
                        self.slots.push(Slot { radicand, denom: denom.clone() });
                        let j = self.slots.len() - 1;
                        let idx = self.layout.r(j);
                        if self.names.len() <= self.layout.t(j) {
                            self.names.resize(self.layout.t(j) + 1, String::new());
                        }
                        self.names[idx] = name;
                        self.names[self.layout.t(j)] = format!("t{}", j + 1);
                        j
                    }
                };
                self.roots.push(((**a).clone(), j));
                (MPoly::var(self.layout.r(j)), denom)
            }
        })
    }
}

struct Elimin {
    poly: MPoly,
    squarings: u32,
}

// Removes radicals from `p` outermost first.
fn eliminate_radicals(conv: &Converter, mut p: MPoly, steps: &mut Option<&mut Vec<Step>>) -> Result<Elimin, EngineError> {
    let mut squarings = 0;
    for j in (0..conv.slots.len()).rev() {
        let rv = conv.layout.r(j);
        p = conv.reduce(&p);
        let cs = p.collect_in(rv);
        if cs.len() < 2 {
            continue;
        }
        let a = &cs[0];
        let b = &cs[1];
        let r = MPoly::var(rv);
        if let Some(steps) = steps.as_deref_mut() {
            let lhs = (b * &r).render(&conv.names, 0);
            let rhs = (-a).render(&conv.names, 0);
            steps.push(Step { rule: Rule::IsolateRadical, before: format!("{} = 0", p.render(&conv.names, 0)), after: format!("{lhs} = {rhs}") });
            let sq_l = (&(b * b) * &conv.full_radicand(j)).render(&conv.names, 0);
            let sq_r = (a * a).render(&conv.names, 0);
            steps.push(Step { rule: Rule::SquareBothSides, before: format!("{lhs} = {rhs}"), after: format!("{sq_l} = {sq_r}") });
        }
        p = &(a * a) - &(&(b * b) * &conv.full_radicand(j));
        squarings += 1;
        if squarings > MAX_SQUARINGS {
            return Err(EngineError::not_reducible(format!("more than {MAX_SQUARINGS} squarings needed")));
        }
    }
    let p = conv.reduce(&p);
    for j in 0..conv.slots.len() {
        if p.mentions(conv.layout.r(j)) {
            return Err(EngineError::not_reducible("radical survived elimination"));
        }
    }
    Ok(Elimin { poly: p, squarings })
}

fn uppercase_name(u: &str, taken: &[String]) -> String {
    let up = u.to_uppercase();
    if up != u && !taken.contains(&up) {
        return up;
    }
    for cand in ["T", "U", "W", "Z"] {
        if cand != u && !taken.iter().any(|t| t == cand) {
            return cand.to_string();
        }
    }
    format!("{u}_")
}

fn relations_text(rels: &[Relation]) -> String {
    rels.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; ")
}

// Counts square roots of the bare unknown: (top-level, nested in a root).
fn sqrt_occurrences(e: &Expr, u: &str, inside_root: bool) -> (usize, usize) {
    match e {
        Expr::Root(a, 2) if matches!(a.as_ref(), Expr::Var(n) if n == u) => {
            if inside_root {
                (0, 1)
            } else {
                (1, 0)
            }
        }
        Expr::Root(a, _) => sqrt_occurrences(a, u, true),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            let (x1, y1) = sqrt_occurrences(a, u, inside_root);
            let (x2, y2) = sqrt_occurrences(b, u, inside_root);
            (x1 + x2, y1 + y2)
        }
        Expr::Pow(a, _) => sqrt_occurrences(a, u, inside_root),
        _ => (0, 0),
    }
}

struct Plan {
    unknown: String,
    eliminations: Vec<Elimination>,
    remaining: Vec<Relation>,
    nonconstant: usize,
    steps: Vec<Step>,
}

fn plan_for(p: &ProblemSpec, rels: &[Relation], u: &str) -> Option<Plan> {
    let mut rels = rels.to_vec();
    let mut others: Vec<String> = p.unknowns.iter().filter(|v| *v != u).cloned().collect();
    let mut eliminations = Vec::new();
    let mut steps = Vec::new();
    let mut nonconstant = 0;
    while !others.is_empty() {
        let mut best: Option<(usize, usize, Expr, bool)> = None;
        'search: for (vi, v) in others.iter().enumerate().rev() {
            for (ri, r) in rels.iter().enumerate() {
                let Relation::Equals(l, rhs) = r else { continue };
                if let Some((e, constant)) = isolate_linear(l, rhs, v) {
                    if best.is_none() || constant {
                        best = Some((vi, ri, e, constant));
                    }
                    if constant {
                        break 'search;
                    }
                }
            }
        }
        let (vi, ri, e, constant) = best?;
        let v = others.remove(vi);
        let used = rels.remove(ri);
        let before = relations_text(&rels);
        rels = rels.iter().map(|r| r.substitute(&v, &e)).collect();
        steps.push(Step {
            rule: Rule::Substitute,
            before: format!("{v} = {e} (from {used}) into {before}"),
            after: relations_text(&rels),
        });
        if !constant {
            nonconstant += 1;
        }
        eliminations.push(Elimination { unknown: v, expr: e });
    }
    Some(Plan { unknown: u.to_string(), eliminations, remaining: rels, nonconstant, steps })
}

pub fn reduce_problem(p: &ProblemSpec, bindings: &Assignment) -> Result<ReductionTrace, EngineError> {
    if p.is_missing() {
        return Err(EngineError::NotReducible { id: p.id, reason: "the problem has no stated relations".into() });
    }
    reduce_inner(p, bindings).map_err(|e| match e {
        EngineError::NotReducible { reason, .. } => EngineError::NotReducible { id: p.id, reason },
        other => other,
    })
}

fn reduce_inner(p: &ProblemSpec, bindings: &Assignment) -> Result<ReductionTrace, EngineError> {
    let mut steps = Vec::new();
    let mut rels = p.relations.clone();
    let mut bound = Assignment::new();
    let mut parameters = Vec::new();
    for q in &p.parameters {
        match bindings.get(&q.name) {
            Some(v) => {
                bound.set(&q.name, v.clone());
                let before = relations_text(&rels);
                rels = rels.iter().map(|r| r.substitute(&q.name, &Expr::Const(v.clone()))).collect();
                if before != relations_text(&rels) {
                    steps.push(Step {
                        rule: Rule::Substitute,
                        before: format!("{} = {} into {before}", q.name, format_rational(v)),
                        after: relations_text(&rels),
                    });
                }
            }
            None => parameters.push(q.name.clone()),
        }
    }

    let plan = p
        .unknowns
        .iter()
        .filter_map(|u| plan_for(p, &rels, u))
        .min_by_key(|pl| pl.nonconstant)
        .ok_or_else(|| EngineError::not_reducible("other unknowns cannot be eliminated by linear substitution"))?;
    steps.extend(plan.steps);
    let core: Vec<Relation> = plan.remaining.iter().filter(|r| !matches!(r, Relation::Greater(..))).cloned().collect();
    let [single] = core.as_slice() else {
        return Err(EngineError::not_reducible(format!(
            "{} relations remain after elimination; the pipeline needs exactly one",
            core.len()
        )));
    };
    let kind = match single {
        Relation::Equals(..) => ReductionKind::Roots,
        Relation::IsSquare(_) => ReductionKind::SquareCondition,
        _ => return Err(EngineError::not_reducible("only equations and square predicates are reduced")),
    };

    let unknown = plan.unknown.clone();
    let mut variable = unknown.clone();
    let mut reduced = single.clone();
    let (top, nested) = reduced.exprs().iter().fold((0, 0), |(a, b), e| {
        let (x, y) = sqrt_occurrences(e, &unknown, false);
        (a + x, b + y)
    });
    let square_substitution = top > 0 && nested == 0;
    if square_substitution {
        let mut taken = p.unknowns.clone();
        taken.extend(p.parameters.iter().map(|q| q.name.clone()));
        variable = uppercase_name(&unknown, &taken);
        let big = Expr::var(&variable);
        let sq = Expr::pow(big.clone(), 2);
        let before = reduced.to_string();
        reduced = reduced.substitute(&unknown, &sq).map_exprs(|e| {
            e.map_bottom_up(&mut |node| match &node {
                Expr::Root(a, 2) if **a == sq => big.clone(),
                _ => node,
            })
        });
        steps.push(Step {
            rule: Rule::Substitute,
            before: format!("{unknown} = {variable}^2 into {before}"),
            after: reduced.to_string(),
        });
    }

    let mut vars = BTreeMap::new();
    vars.insert(variable.clone(), 0usize);
    for (i, q) in parameters.iter().enumerate() {
        vars.insert(q.clone(), i + 1);
    }
    let layout = Layout { params: parameters.len() };
    let mut base_names = vec![variable.clone()];
    base_names.extend(parameters.iter().cloned());
    base_names.push("s".to_string());

    let run = |slack: bool, steps: Option<&mut Vec<Step>>| -> Result<(MPoly, u32, Converter), EngineError> {
        let mut conv = Converter { vars: &vars, layout, slack, slots: Vec::new(), roots: Vec::new(), names: base_names.clone() };
        let mut steps = steps;
        let p0 = match &reduced {
            Relation::Equals(l, r) => {
                let (nl, dl) = conv.conv(l)?;
                let (nr, dr) = conv.conv(r)?;
                let mut p0 = &(&nl * &dr) - &(&nr * &dl);
                if slack {
                    p0 = &p0 - &(&MPoly::var(layout.slack()) * &(&dl * &dr));
                }
                let p0 = conv.reduce(&p0);
                if let Some(st) = steps.as_deref_mut() {
                    let rule = if dl.as_constant().is_some() && dr.as_constant().is_some() {
                        Rule::Collect
                    } else {
                        Rule::ClearDenominators
                    };
                    st.push(Step { rule, before: reduced.to_string(), after: format!("{} = 0", p0.render(&conv.names, 0)) });
                }
                p0
            }
            Relation::IsSquare(e) => {
                let (n, d) = conv.conv(e)?;
                if !conv.slots.is_empty() {
                    return Err(EngineError::not_reducible("square predicate still contains a radical"));
                }
                let p0 = &n * &d;
                if let Some(st) = steps.as_deref_mut() {
                    let rule = if d.as_constant().is_some() { Rule::Collect } else { Rule::ClearDenominators };
                    st.push(Step { rule, before: reduced.to_string(), after: format!("isSquare({})", p0.render(&conv.names, 0)) });
                }
                p0
            }
            _ => unreachable!("kind checked above"),
        };
        let el = eliminate_radicals(&conv, p0, &mut steps)?;
        Ok((el.poly, el.squarings, conv))
    };

    let (raw, squaring_count, _) = run(false, Some(&mut steps))?;
    let names = base_names[..=parameters.len()].to_vec();
    if raw.is_zero() {
        return Err(EngineError::not_reducible("the relation reduces to the zero polynomial"));
    }
    let eliminant = match kind {
        ReductionKind::Roots => match raw.leading_in(0).as_constant() {
            Some(lead) if !lead.is_one() => {
                let monic = raw.scale(&lead.recip());
                steps.push(Step { rule: Rule::Collect, before: raw.render(&names, 0), after: monic.render(&names, 0) });
                monic
            }
            _ => raw,
        },
        ReductionKind::SquareCondition => raw,
    };

    let zero_multiplicity = match kind {
        ReductionKind::Roots => eliminant.min_degree_in(0),
        ReductionKind::SquareCondition => 0,
    };
    let factored = eliminant.divide_by_power(0, zero_multiplicity);
    if zero_multiplicity > 0 {
        steps.push(Step {
            rule: Rule::FactorOutUnknown,
            before: eliminant.render(&names, 0),
            after: format!("{} * ({})", Polynomial::x().pow(zero_multiplicity).render(&variable), factored.render(&names, 0)),
        });
    }

    let mut shift = Rational::zero();
    let mut result = factored.clone();
    let mut result_variable = variable.clone();
    let wanted: &[u32] = match kind {
        ReductionKind::Roots => &[3, 4],
        ReductionKind::SquareCondition => &[2],
    };
    if let Some(uni) = factored.to_univariate(0) {
        let d = factored.degree_in(0);
        if wanted.contains(&d) && !uni.coeff(d as usize - 1).is_zero() {
            let c = uni.depressing_shift().expect("degree at least 1");
            let mut taken: Vec<String> = parameters.clone();
            taken.extend(p.unknowns.iter().cloned());
            taken.push(variable.clone());
            result_variable = uppercase_name(&variable, &taken);
            result = MPoly::from_univariate(&uni.compose_shift(&c), 0);
            let mut rnames = names.clone();
            rnames[0] = result_variable.clone();
            steps.push(Step {
                rule: Rule::Shift,
                before: format!("{} with {}", factored.render(&names, 0), shift_text(&result_variable, &variable, &c)),
                after: result.render(&rnames, 0),
            });
            shift = c;
        }
    }

    let audit = match kind {
        ReductionKind::Roots => {
            let (slack, _, conv) = run(true, None)?;
            Audit { slack, slots: conv.slots, roots: conv.roots, layout }
        }
        ReductionKind::SquareCondition => Audit { slack: MPoly::zero(), slots: Vec::new(), roots: Vec::new(), layout },
    };

    let mut trace = ReductionTrace {
        problem_id: p.id,
        steps,
        kind,
        unknown,
        variable,
        square_substitution,
        eliminations: plan.eliminations,
        reduced,
        parameters,
        bindings: bound,
        eliminant,
        zero_multiplicity,
        factored,
        shift,
        result,
        result_variable,
        squaring_count,
        solution_map: String::new(),
        audit,
    };
    trace.solution_map = trace.describe_map();
    Ok(trace)
}

fn shift_text(big: &str, small: &str, c: &Rational) -> String {
    let p = Polynomial::new(vec![c.clone(), Rational::one()]);
    format!("{big} = {}", p.render(small))
}

fn replace_roots(e: &Expr, roots: &[(Expr, usize)], values: &[Rational]) -> Expr {
    match e {
        Expr::Root(a, 2) => match roots.iter().find(|(arg, _)| arg == a.as_ref()) {
            Some((_, j)) => Expr::Const(values[*j].clone()),
            None => Expr::root(replace_roots(a, roots, values), 2),
        },
        Expr::Root(a, k) => Expr::root(replace_roots(a, roots, values), *k),
        Expr::Add(a, b) => Expr::add(replace_roots(a, roots, values), replace_roots(b, roots, values)),
        Expr::Sub(a, b) => Expr::sub(replace_roots(a, roots, values), replace_roots(b, roots, values)),
        Expr::Mul(a, b) => Expr::mul(replace_roots(a, roots, values), replace_roots(b, roots, values)),
        Expr::Div(a, b) => Expr::div(replace_roots(a, roots, values), replace_roots(b, roots, values)),
        Expr::Pow(a, k) => Expr::pow(replace_roots(a, roots, values), *k),
        _ => e.clone(),
    }
}

impl ReductionTrace {
    /// Names of the polynomial variables: the eliminant's variable, then the
    /// symbolic parameters.
    pub fn names(&self) -> Vec<String> {
        let mut n = vec![self.variable.clone()];
        n.extend(self.parameters.iter().cloned());
        n
    }

    pub fn result_names(&self) -> Vec<String> {
        let mut n = self.names();
        n[0] = self.result_variable.clone();
        n
    }

    pub fn render_eliminant(&self) -> String {
        self.eliminant.render(&self.names(), 0)
    }

    pub fn render_factored(&self) -> String {
        self.factored.render(&self.names(), 0)
    }

    /// `u^m` for the factored-out zero roots.
    pub fn render_zero_factor(&self) -> String {
        Polynomial::x().pow(self.zero_multiplicity).render(&self.variable)
    }

    /// The shift as `X = u + c`.
    pub fn render_shift(&self) -> String {
        let p = Polynomial::new(vec![self.shift.clone(), Rational::one()]);
        format!("{} = {}", self.result_variable, p.render(&self.variable))
    }

    pub fn render_result(&self) -> String {
        self.result.render(&self.result_names(), 0)
    }

    /// The result as a univariate polynomial when no parameter is symbolic.
    pub fn result_polynomial(&self) -> Option<Polynomial> {
        self.result.to_univariate(0)
    }

    pub fn eliminant_polynomial(&self) -> Option<Polynomial> {
        self.eliminant.to_univariate(0)
    }

    fn describe_map(&self) -> String {
        let mut parts = Vec::new();
        if self.result_variable != self.variable {
            let back = Polynomial::new(vec![-self.shift.clone(), Rational::one()]);
            parts.push(format!("{} = {}", self.variable, back.render(&self.result_variable)));
        }
        if self.square_substitution {
            parts.push(format!("{} = {}^2", self.unknown, self.variable));
        }
        for e in self.eliminations.iter().rev() {
            parts.push(format!("{} = {}", e.unknown, e.expr));
        }
        if parts.is_empty() {
            format!("{} is the root itself", self.unknown)
        } else {
            parts.join("; ")
        }
    }

    /// Maps a value of the eliminant's variable back to all unknowns; `None`
    /// when an elimination expression is undefined there.
    pub fn back_map(&self, value: &Rational) -> Option<Assignment> {
        let mut all = self.bindings.clone();
        let orig = if self.square_substitution { value * value } else { value.clone() };
        all.set(&self.unknown, orig);
        for e in self.eliminations.iter().rev() {
            let v = eval(&e.expr, &all).ok()??;
            all.set(&e.unknown, v);
        }
        let mut out = Assignment::new();
        for (k, v) in all.iter() {
            if *k == self.unknown || self.eliminations.iter().any(|e| &e.unknown == k) {
                out.set(k, v.clone());
            }
        }
        Some(out)
    }

    /// Exact polynomial identities between the stages of the trace.
    pub(crate) fn structural_check(&self) -> Result<(), String> {
        if self.result.is_zero() {
            return Err("result is the zero polynomial".into());
        }
        let squares = self.steps.iter().filter(|s| s.rule == Rule::SquareBothSides).count() as u32;
        if squares != self.squaring_count {
            return Err("squaring count disagrees with the steps".into());
        }
        let u = MPoly::var(0);
        if &u.pow(self.zero_multiplicity) * &self.factored != self.eliminant {
            return Err("eliminant is not u^m times the factored polynomial".into());
        }
        let shifted_back = self.result.substitute(0, &(&u + &MPoly::constant(self.shift.clone())));
        if shifted_back != self.factored {
            return Err("result(u + c) differs from the factored polynomial".into());
        }
        if self.kind == ReductionKind::Roots {
            let lay = self.audit.layout;
            let mut g = self.audit.slack.specialize(lay.slack(), &Rational::zero());
            for j in 0..self.audit.slots.len() {
                g = g.specialize(lay.t(j), &Rational::zero());
            }
            if self.eliminant.proportional(&g).is_none() {
                return Err("slack eliminant at zero slack is not a multiple of the eliminant".into());
            }
        }
        Ok(())
    }

    fn base_assignment(&self, u: &Rational, params: &[Rational]) -> Assignment {
        let mut a = self.bindings.clone();
        a.set(&self.variable, u.clone());
        for (name, v) in self.parameters.iter().zip(params) {
            a.set(name, v.clone());
        }
        a
    }

    fn point_text(&self, u: &Rational, params: &[Rational], extra: &[(String, Rational)]) -> String {
        let mut parts = vec![format!("{}={}", self.variable, format_rational(u))];
        for (n, v) in self.parameters.iter().zip(params) {
            parts.push(format!("{n}={}", format_rational(v)));
        }
        for (n, v) in extra {
            parts.push(format!("{n}={}", format_rational(v)));
        }
        parts.join(", ")
    }

    pub(crate) fn probe_roots(&self, rng: &mut impl Rng) -> Probe {
        let lay = self.audit.layout;
        let k = self.audit.slots.len();
        let u = sample_rational(rng);
        let params: Vec<Rational> = self.parameters.iter().map(|_| sample_rational(rng)).collect();
        let mut point = vec![Rational::zero(); lay.t(k.max(1)) + 1];
        point[0] = u.clone();
        for (i, v) in params.iter().enumerate() {
            point[i + 1] = v.clone();
        }
        let mut values = Vec::with_capacity(k);
        let mut extra = Vec::new();
        for j in 0..k {
            let r = sample_rational(rng);
            point[lay.r(j)] = r.clone();
            let slot = &self.audit.slots[j];
            let d = slot.denom.eval(&point);
            if d.is_zero() {
                return Probe::Rejected;
            }
            let t = &r * &r - slot.radicand.eval(&point);
            point[lay.t(j)] = t.clone();
            values.push(&r / &d);
            extra.push((format!("r{}", j + 1), r));
            extra.push((format!("t{}", j + 1), t));
        }
        let Relation::Equals(l, r) = &self.reduced else { return Probe::Rejected };
        let diff = Expr::sub(replace_roots(l, &self.audit.roots, &values), replace_roots(r, &self.audit.roots, &values));
        let s = match eval(&diff, &self.base_assignment(&u, &params)) {
            Ok(Some(s)) => s,
            _ => return Probe::Rejected,
        };
        point[lay.slack()] = s.clone();
        extra.push(("s".into(), s.clone()));
        if !self.audit.slack.eval(&point).is_zero() {
            return Probe::Fail { point: self.point_text(&u, &params, &extra), check: "slack eliminant does not vanish" };
        }
        if s.is_zero() && !self.eliminant.eval(&point[..=self.parameters.len()]).is_zero() {
            return Probe::Fail { point: self.point_text(&u, &params, &extra), check: "relation holds but eliminant is nonzero" };
        }
        let mut equivalent = false;
        if self.squaring_count == 0 {
            point[lay.slack()] = &s + Rational::one();
            equivalent = !self.audit.slack.eval(&point).is_zero();
        }
        Probe::Pass { equivalent }
    }

    pub(crate) fn probe_square(&self, rng: &mut impl Rng, forced: bool) -> Probe {
        let params: Vec<Rational> = self.parameters.iter().map(|_| sample_rational(rng)).collect();
        let Relation::IsSquare(e) = &self.reduced else { return Probe::Rejected };
        let family = self.conic_family();
        let u = match (&family, forced) {
            (Some((lead_root, d)), true) => {
                let t = sample_rational(rng);
                if t.is_zero() {
                    return Probe::Rejected;
                }
                let big = (&t - d / &t) / (lead_root * arith::int(2));
                big - &self.shift
            }
            _ => sample_rational(rng),
        };
        let a = self.base_assignment(&u, &params);
        let value = match eval(e, &a) {
            Ok(Some(v)) => v,
            _ => return Probe::Rejected,
        };
        let mut point = vec![u.clone()];
        point.extend(params.iter().cloned());
        let el = self.eliminant.eval(&point);
        let text = || self.point_text(&u, &params, &[]);
        if value.is_zero() {
            if !el.is_zero() {
                return Probe::Fail { point: text(), check: "relation value zero but eliminant nonzero" };
            }
        } else if el.is_zero() || !arith::is_rational_square(&(&el / &value)) {
            return Probe::Fail { point: text(), check: "eliminant and relation differ by a non-square factor" };
        }
        if forced && family.is_some() && !arith::is_rational_square(&value) {
            return Probe::Fail { point: text(), check: "parametrized point does not satisfy the square condition" };
        }
        Probe::Pass { equivalent: true }
    }

    /// For a depressed quadratic `e^2 X^2 + d` with rational `e`: `(e, d)`.
    pub fn conic_family(&self) -> Option<(Rational, Rational)> {
        let r = self.result_polynomial()?;
        if r.degree() != Some(2) || !r.coeff(1).is_zero() {
            return None;
        }
        let lead = r.coeff(2);
        if lead.is_zero() || lead < Rational::zero() {
            return None;
        }
        let e = arith::rational_kth_root(&lead, 2).ok()??;
        Some((e, r.coeff(0)))
    }
}

/// How a printed polynomial compares with the derived stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceComparison {
    pub label: String,
    pub printed: String,
    /// The first stage (eliminant, factored, result) proportional to the
    /// printed polynomial.
    pub stage: Option<String>,
}

impl ReferenceComparison {
    pub fn agrees(&self) -> bool {
        self.stage.is_some()
    }

    pub fn verdict(&self) -> &'static str {
        if self.agrees() {
            "AGREES"
        } else {
            "MISMATCH"
        }
    }
}

pub fn compare_reference(t: &ReductionTrace, form: &ReferenceForm) -> ReferenceComparison {
    let mut e = form.expr.clone();
    for (k, v) in t.bindings.iter() {
        e = expr::substitute(&e, k, &Expr::Const(v.clone()));
    }
    let mut vars = BTreeMap::new();
    vars.insert(form.variable.clone(), 0usize);
    for (i, q) in t.parameters.iter().enumerate() {
        vars.insert(q.clone(), i + 1);
    }
    let mut names = vec![form.variable.clone()];
    names.extend(t.parameters.iter().cloned());
    let layout = Layout { params: t.parameters.len() };
    let mut conv = Converter { vars: &vars, layout, slack: false, slots: Vec::new(), roots: Vec::new(), names: names.clone() };
    let printed_poly = match conv.conv(&e) {
        Ok((n, d)) if conv.slots.is_empty() => d.as_constant().map(|c| n.scale(&c.recip())),
        _ => None,
    };
    let printed = printed_poly.as_ref().map_or_else(|| form.expr.to_string(), |p| p.render(&names, 0));
    let mut stage = None;
    if let Some(pp) = &printed_poly {
        let mut stages: Vec<(&str, &MPoly)> = Vec::new();
        if form.variable == t.variable {
            stages.push(("eliminant", &t.eliminant));
            stages.push(("factored", &t.factored));
        }
        if form.variable == t.result_variable {
            stages.push(("result", &t.result));
        }
        stage = stages.into_iter().find(|(_, s)| s.proportional(pp).is_some()).map(|(n, _)| n.to_string());
    }
    ReferenceComparison { label: form.label.clone(), printed, stage }
}

/// Sign of the result's discriminant against a claimed sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminantVerdict {
    pub polynomial: String,
    pub discriminant: String,
    pub sign: String,
    pub claim: Option<String>,
    pub verdict: Option<String>,
}

pub fn discriminant_verdict(t: &ReductionTrace, claim: Option<&str>) -> Option<DiscriminantVerdict> {
    let poly = t.result_polynomial()?;
    let disc = poly.discriminant()?;
    let sign = arith::sign_char(&disc).to_string();
    let verdict = claim.map(|c| if c == sign { "CONFIRMS".to_string() } else { "REFUTES".to_string() });
    Some(DiscriminantVerdict {
        polynomial: t.render_result(),
        discriminant: format_rational(&disc),
        sign,
        claim: claim.map(str::to_string),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_catalog, get_problem};

    fn reduce(id: u32, bind: &[(&str, i64)]) -> ReductionTrace {
        let c = default_catalog();
        let p = get_problem(&c, id).unwrap();
        let mut b = Assignment::new();
        for (k, v) in bind {
            b.set(k, arith::int(*v));
        }
        reduce_problem(p, &p.bindings(&b).unwrap()).unwrap()
    }

    #[test]
    fn problem_21_sextic() {
        let t = reduce(21, &[]);
        assert_eq!(t.render_eliminant(), "x^6 - 3x^5 + 2x^4 - x^3");
        assert_eq!(t.zero_multiplicity, 3);
        assert_eq!(t.render_factored(), "x^3 - 3x^2 + 2x - 1");
        assert_eq!(t.render_result(), "X^3 - X - 1");
        assert_eq!(t.squaring_count, 1);
    }

    #[test]
    fn problem_28_cubic() {
        let t = reduce(28, &[]);
        assert_eq!(t.render_eliminant(), "x^4 + 6x^3 - 591x^2 + 900x");
        assert_eq!(t.render_factored(), "x^3 + 6x^2 - 591x + 900");
        assert_eq!(t.shift, arith::int(2));
        assert_eq!(t.render_result(), "X^3 - 603X + 2098");
        assert_eq!(t.solution_map, "x = X - 2");
        let rules: Vec<Rule> = t.steps.iter().map(|s| s.rule).collect();
        assert!(rules.contains(&Rule::FactorOutUnknown) && rules.contains(&Rule::Shift));
    }

    #[test]
    fn problem_17_two_squarings() {
        let t = reduce(17, &[]);
        assert_eq!(t.squaring_count, 2);
        assert_eq!(t.variable, "x");
        // oracle: x = (5 - (10 - x)^2)^2
        let x = Polynomial::x();
        let ten_minus = &Polynomial::from_ints(&[10]) - &x;
        let inner = &Polynomial::from_ints(&[5]) - &ten_minus.pow(2);
        let oracle = &inner.pow(2) - &x;
        assert_eq!(t.eliminant_polynomial().unwrap(), oracle.monic());
    }

    #[test]
    fn problem_6_symbolic_sextic() {
        let t = reduce(6, &[]);
        assert_eq!(t.variable, "X");
        assert_eq!(t.parameters, ["n"]);
        // oracle: (n - X^3)^2 - (10 - X^2)^3, made monic
        let x = MPoly::var(0);
        let n = MPoly::var(1);
        let a = &n - &x.pow(3);
        let b = &MPoly::constant(arith::int(10)) - &x.pow(2);
        let oracle = &a.pow(2) - &b.pow(3);
        assert!(t.eliminant.proportional(&oracle).is_some());
        assert_eq!(t.eliminant.degree_in(0), 6);
        let printed = compare_reference(&t, &get_problem(&default_catalog(), 6).unwrap().reference_forms[0]);
        assert!(!printed.agrees());
    }

    #[test]
    fn problem_5_printed_expansion_agrees_after_factoring() {
        let t = reduce(5, &[]);
        let cmp = compare_reference(&t, &get_problem(&default_catalog(), 5).unwrap().reference_forms[0]);
        assert_eq!(cmp.stage.as_deref(), Some("factored"));
    }

    #[test]
    fn problem_16_completes_square() {
        let t = reduce(16, &[]);
        assert_eq!(t.kind, ReductionKind::SquareCondition);
        assert_eq!(t.render_eliminant(), "x^2 - 10x - 10");
        assert_eq!(t.render_result(), "X^2 - 35");
        assert_eq!(t.shift, arith::int(-5));
    }

    #[test]
    fn eliminations_and_back_map() {
        let t = reduce(29, &[("a", 12), ("b", 5)]);
        assert_eq!(t.unknown, "y");
        assert_eq!(t.variable, "Y");
        let a = t.back_map(&arith::int(2)).unwrap();
        assert_eq!(a.get("y"), Some(&arith::int(4)));
        assert_eq!(a.get("x"), Some(&arith::int(3)));
    }

    #[test]
    fn reducible_set() {
        let c = default_catalog();
        for id in [4, 5, 6, 15, 16, 17, 21, 22, 25, 28, 29, 31, 32, 33] {
            let p = get_problem(&c, id).unwrap();
            let t = reduce_problem(p, &p.bindings(&Assignment::new()).unwrap());
            assert!(t.is_ok(), "problem {id}: {:?}", t.err());
        }
        for id in [1, 3, 7, 19, 27] {
            let p = get_problem(&c, id).unwrap();
            assert!(reduce_problem(p, &Assignment::new()).is_err(), "problem {id}");
        }
    }

    #[test]
    fn zero_squarings_for_salary() {
        let t = reduce(31, &[]);
        assert_eq!(t.squaring_count, 0);
        assert_eq!(t.render_result(), "X^3 - 30a");
    }
}
