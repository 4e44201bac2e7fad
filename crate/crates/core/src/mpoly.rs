//! Sparse multivariate polynomials over the rationals.
//!
//! Used internally by the reduction pipeline, where the unknown, unbound
//! parameters and each radical get their own variable index. Exponent
//! vectors are stored with trailing zeros trimmed so polynomials over
//! different numbers of variables compare structurally.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::arith::{self, Rational};
use crate::poly::{monomial, Polynomial};

pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rational>,
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn exp_of(m: &Monomial, var: usize) -> u32 {
    m.get(var).copied().unwrap_or(0)
}

impl MPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(i: usize) -> Self {
        let mut m = vec![0; i + 1];
        m[i] = 1;
        let mut p = Self::zero();
        p.add_term(m, Rational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let m = trim(m);
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| exp_of(m, var)).max().unwrap_or(0)
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Coefficients with respect to `var`: `self = sum_k coeffs[k] * var^k`.
    pub fn collect_in(&self, var: usize) -> Vec<MPoly> {
        let mut out = vec![Self::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let k = exp_of(m, var);
            let mut rest = m.clone();
            if (var) < rest.len() {
                rest[var] = 0;
            }
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Replaces `var` by the polynomial `value`.
    pub fn substitute(&self, var: usize, value: &MPoly) -> Self {
        let coeffs = self.collect_in(var);
        coeffs.iter().rev().fold(Self::zero(), |acc, c| &(&acc * value) + c)
    }

    /// Rewrites every power `r^k`, `k >= 2`, using `r^2 = radicand`.
    pub fn reduce_square(&self, var: usize, radicand: &MPoly) -> Self {
        if self.degree_in(var) < 2 {
            return self.clone();
        }
        let coeffs = self.collect_in(var);
        let r = Self::var(var);
        let mut out = Self::zero();
        let mut even_power = Self::one();
        for (k, c) in coeffs.iter().enumerate() {
            if k >= 2 && k % 2 == 0 {
                even_power = &even_power * radicand;
            }
            if c.is_zero() {
                continue;
            }
            let term = if k % 2 == 0 { c * &even_power } else { &(c * &even_power) * &r };
            out = &out + &term;
        }
        out
    }

    /// Evaluates at a full point; variables beyond `point.len()` must not occur.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial evaluation at `var = value`.
    pub fn specialize(&self, var: usize, value: &Rational) -> Self {
        self.substitute(var, &Self::constant(value.clone()))
    }

    /// The univariate polynomial in `var` when no other variable occurs.
    pub fn to_univariate(&self, var: usize) -> Option<Polynomial> {
        let coeffs = self.collect_in(var);
        let consts: Option<Vec<Rational>> = coeffs.iter().map(|c| c.as_constant()).collect();
        consts.map(Polynomial::new)
    }

    pub fn from_univariate(p: &Polynomial, var: usize) -> Self {
        let x = Self::var(var);
        p.coeffs().iter().rev().fold(Self::zero(), |acc, c| &(&acc * &x) + &Self::constant(c.clone()))
    }

    /// Largest `m` such that `var^m` divides every term.
    pub fn min_degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| exp_of(m, var)).min().unwrap_or(0)
    }

    /// Divides by `var^m`; caller guarantees divisibility.
    pub fn divide_by_power(&self, var: usize, m: u32) -> Self {
        let mut out = Self::zero();
        for (mono, c) in &self.terms {
            let mut mono = mono.clone();
            if m > 0 {
                mono[var] -= m;
            }
            out.add_term(mono, c.clone());
        }
        out
    }

    /// Coefficient of the highest power of `var`.
    pub fn leading_in(&self, var: usize) -> MPoly {
        self.collect_in(var).pop().unwrap_or_default()
    }

    /// `Some(k)` when `other = k * self` for a nonzero rational `k`.
    pub fn proportional(&self, other: &MPoly) -> Option<Rational> {
        let (m, c) = self.terms.iter().next()?;
        let k = other.terms.get(m)? / c;
        (!k.is_zero() && &self.scale(&k) == other).then_some(k)
    }

    /// Descending in `main` (the rendering variable), remaining variables by
    /// index; `names[i]` renders variable `i`.
    pub fn render(&self, names: &[String], main: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da = exp_of(a, main);
            let db = exp_of(b, main);
            db.cmp(&da).then_with(|| {
                let ta: u32 = a.iter().sum();
                let tb: u32 = b.iter().sum();
                tb.cmp(&ta)
            }).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (m, c) in terms {
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&render_monomial(&c.abs(), m, names, main));
        }
        out
    }
}

fn render_monomial(c: &Rational, m: &Monomial, names: &[String], main: usize) -> String {
    let mut order: Vec<usize> = (0..m.len()).filter(|&i| m[i] > 0 && i != main).collect();
    if exp_of(m, main) > 0 {
        order.push(main);
    }
    if order.is_empty() {
        return arith::format_rational(c);
    }
    let mut factors = String::new();
    for (n, &i) in order.iter().enumerate() {
        let name = &names[i];
        let sep = if n > 0 && name.len() > 1 { "*" } else { "" };
        let p = monomial(&Rational::one(), name, m[i] as usize);
        factors.push_str(sep);
        factors.push_str(&p);
    }
    if c.is_one() {
        factors
    } else if c.is_integer() {
        format!("{}{factors}", c.numer())
    } else {
        format!("({}){factors}", arith::format_rational(c))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let n = ma.len().max(mb.len());
                let m: Monomial = (0..n).map(|i| exp_of(ma, i) + exp_of(mb, i)).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["x", "n", "r"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn arithmetic_and_render() {
        let x = MPoly::var(0);
        let n = MPoly::var(1);
        let p = &(&x.pow(3) - &(&n * &x)) + &MPoly::constant(arith::int(2));
        assert_eq!(p.render(&names(), 0), "x^3 - nx + 2");
        assert!((&p - &p).is_zero());
        assert_eq!(p.degree_in(0), 3);
        assert_eq!(p.specialize(1, &arith::int(0)).to_univariate(0).unwrap().render("x"), "x^3 + 2");
    }

    #[test]
    fn reduce_square_uses_radicand() {
        // r^3 + r^2 with r^2 = x  ->  x r + x
        let r = MPoly::var(2);
        let x = MPoly::var(0);
        let p = &r.pow(3) + &r.pow(2);
        let red = p.reduce_square(2, &x);
        assert_eq!(red, &(&x * &r) + &x);
    }

    #[test]
    fn substitute_and_divide() {
        let x = MPoly::var(0);
        let p = &x.pow(4) + &x.pow(2).scale(&arith::int(3));
        assert_eq!(p.min_degree_in(0), 2);
        let d = p.divide_by_power(0, 2);
        assert_eq!(d.to_univariate(0).unwrap(), Polynomial::from_ints(&[3, 0, 1]));
        let shifted = d.substitute(0, &(&x + &MPoly::one()));
        assert_eq!(shifted.to_univariate(0).unwrap(), Polynomial::from_ints(&[4, 2, 1]));
        assert_eq!(d.proportional(&d.scale(&arith::int(-2))), Some(arith::int(-2)));
        assert_eq!(d.proportional(&shifted), None);
    }
}
