//! Dense univariate polynomials over the rationals.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, format_rational, Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("expected degree {expected}, got {got:?}")]
    WrongDegree { expected: usize, got: Option<usize> },
    #[error("quartic is not depressed (cubic coefficient {0} is nonzero)")]
    NotDepressed(String),
    #[error("coefficient {0} is too large for divisor enumeration")]
    ConstantTooLarge(String),
}

/// Coefficients indexed by degree; trailing zeros are always trimmed, so the
/// zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

// sqrt of the largest constant we are willing to factor by trial division
const DIVISOR_LIMIT: u64 = 100_000_000_000_000;

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// From integer coefficients, lowest degree first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| arith::int(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `x - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&(Rational::one() / lc)),
            None => self.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    /// Returns `q` with `q(X) = p(X - c)`, i.e. the substitution `X = x + c`.
    pub fn compose_shift(&self, c: &Rational) -> Self {
        let x_minus_c = Self::new(vec![-c.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, a| &(&acc * &x_minus_c) + &Self::constant(a.clone()))
    }

    /// The shift `c` for which `compose_shift(c)` removes the second-highest
    /// coefficient; `None` for constants.
    pub fn depressing_shift(&self) -> Option<Rational> {
        let d = self.degree().filter(|&d| d >= 1)?;
        let lead = &self.coeffs[d];
        Some(&self.coeffs[d - 1] / (lead * arith::int(d as i64)))
    }

    /// Splits off the largest power of `x` dividing `p`: `p = x^m * q`.
    pub fn split_zero_roots(&self) -> (usize, Polynomial) {
        let m = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (0, self.clone());
        }
        (m, Polynomial::new(self.coeffs[m..].to_vec()))
    }

    /// Long division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        let dd = d.degree().ok_or(PolyError::ZeroPolynomial)?;
        let mut rem = self.coeffs.clone();
        let lead = &d.coeffs[dd];
        let Some(sd) = self.degree().filter(|&s| s >= dd) else {
            return Ok((Self::zero(), self.clone()));
        };
        let mut quot = vec![Rational::zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = &rem[i + dd] / lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Clears denominators and removes the content: the primitive integer
    /// polynomial with positive leading coefficient and the same roots.
    pub fn primitive_integer(&self) -> Vec<Integer> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self.coeffs.iter().fold(Integer::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<Integer> = self.coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let g = ints.iter().fold(Integer::zero(), |g, c| g.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -Integer::one() } else { Integer::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// All `±a/b` with `a | c_0`, `b | c_n` for the primitive integer form
    /// with zero roots removed, ascending. Zero itself is not included.
    pub fn rational_root_candidates(&self) -> Result<Vec<Rational>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let (_, core) = self.split_zero_roots();
        let ints = core.primitive_integer();
        if ints.len() <= 1 {
            return Ok(Vec::new());
        }
        check_divisor_limit(&ints)?;
        let c0 = &ints[0];
        let cn = &ints[ints.len() - 1];
        let nums = arith::positive_divisors(c0);
        let dens = arith::positive_divisors(cn);
        let mut set = BTreeSet::new();
        for a in &nums {
            for b in &dens {
                let r = Rational::new(a.clone(), b.clone());
                set.insert(-r.clone());
                set.insert(r);
            }
        }
        Ok(set.into_iter().collect())
    }

    /// Exactly the rational roots, ascending, without multiplicity.
    ///
    /// Searches the rational root theorem's candidates with the cheap
    /// necessary conditions `(b - a) | p(1)` and `(b + a) | p(-1)`, and
    /// deflates by each root found.
    pub fn rational_roots(&self) -> Result<Vec<Rational>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let (m, core) = self.split_zero_roots();
        let mut roots = BTreeSet::new();
        if m > 0 {
            roots.insert(Rational::zero());
        }
        let mut ints = core.primitive_integer();
        check_divisor_limit(&ints)?;
        while ints.len() >= 2 {
            let Some((a, b)) = find_integer_root(&ints) else { break };
            roots.insert(Rational::new(a.clone(), b.clone()));
            ints = deflate(&ints, &a, &b);
        }
        Ok(roots.into_iter().collect())
    }

    /// Discriminant from the classical closed forms for degrees 2, 3 and 4.
    pub fn discriminant(&self) -> Option<Rational> {
        let c = |i| self.coeff(i);
        match self.degree()? {
            2 => {
                let (a, b, cc) = (c(2), c(1), c(0));
                Some(&b * &b - arith::int(4) * a * cc)
            }
            3 => {
                let (a, b, cc, d) = (c(3), c(2), c(1), c(0));
                let i = arith::int;
                Some(
                    &b * &b * &cc * &cc - i(4) * &a * &cc * &cc * &cc - i(4) * &b * &b * &b * &d
                        - i(27) * &a * &a * &d * &d
                        + i(18) * &a * &b * &cc * &d,
                )
            }
            4 => Some(quartic_discriminant(&c(4), &c(3), &c(2), &c(1), &c(0))),
            _ => None,
        }
    }

    /// Resolvent cubic `8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2` of the monic
    /// depressed quartic `x^4 + p x^2 + q x + r`. A root `m` splits the
    /// quartic as `(x^2 + p/2 + m)^2 - 2m (x - q/(4m))^2`.
    pub fn ferrari_resolvent(&self) -> Result<Polynomial, PolyError> {
        let (p, q, r) = self.depressed_quartic_coeffs()?;
        let i = arith::int;
        Ok(Polynomial::new(vec![
            -(&q * &q),
            i(2) * &p * &p - i(8) * &r,
            i(8) * &p,
            i(8),
        ]))
    }

    /// Tries to write the depressed quartic as a product of two rational
    /// quadratics using the rational roots of its resolvent.
    pub fn ferrari_factor(&self) -> Result<Option<(Polynomial, Polynomial)>, PolyError> {
        let (p, q, r) = self.depressed_quartic_coeffs()?;
        let lead = self.coeff(4);
        let half = Rational::new(1.into(), 2.into());
        let resolvent = self.ferrari_resolvent()?;
        for m in resolvent.rational_roots()? {
            let (a, b) = if m.is_zero() {
                // biquadratic: (x^2 + p/2)^2 - (p^2/4 - r)
                if !q.is_zero() {
                    continue;
                }
                let disc = &p * &p / arith::int(4) - &r;
                let Some(s) = arith::rational_kth_root(&disc, 2).ok().flatten() else {
                    continue;
                };
                let base = &p * &half;
                (
                    Polynomial::new(vec![&base - &s, Rational::zero(), Rational::one()]),
                    Polynomial::new(vec![&base + &s, Rational::zero(), Rational::one()]),
                )
            } else {
                let two_m = &m * arith::int(2);
                if two_m.is_negative() {
                    continue;
                }
                let Some(s) = arith::rational_kth_root(&two_m, 2).ok().flatten() else {
                    continue;
                };
                // A = x^2 + p/2 + m, B = s (x - q/(4m))
                let c0 = &p * &half + &m;
                let shift = &q / (arith::int(4) * &m);
                let b1 = s.clone();
                let b0 = -(&s * &shift);
                (
                    Polynomial::new(vec![&c0 - &b0, -b1.clone(), Rational::one()]),
                    Polynomial::new(vec![&c0 + &b0, b1, Rational::one()]),
                )
            };
            return Ok(Some((a.scale(&lead), b)));
        }
        Ok(None)
    }

    // (p, q, r) of the monic form; errors unless degree 4 with zero cubic term.
    fn depressed_quartic_coeffs(&self) -> Result<(Rational, Rational, Rational), PolyError> {
        if self.degree() != Some(4) {
            return Err(PolyError::WrongDegree { expected: 4, got: self.degree() });
        }
        if !self.coeff(3).is_zero() {
            return Err(PolyError::NotDepressed(format_rational(&self.coeff(3))));
        }
        let m = self.monic();
        Ok((m.coeff(2), m.coeff(1), m.coeff(0)))
    }

    /// Canonical text in descending powers, e.g. `X^3 - 603X + 2098`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&monomial(&c.abs(), var, k));
        }
        out
    }
}

/// `|c| var^k` without sign; unit coefficients are omitted, fractional ones
/// parenthesized.
// A root `a/b` (b > 0, lowest terms) of the integer polynomial `c`.
fn find_integer_root(c: &[Integer]) -> Option<(Integer, Integer)> {
    let n = c.len() - 1;
    if n == 1 {
        let r = Rational::new(-c[0].clone(), c[1].clone());
        return Some((r.numer().clone(), r.denom().clone()));
    }
    let p1: Integer = c.iter().sum();
    let pm1: Integer = c.iter().enumerate().map(|(i, x)| if i % 2 == 0 { x.clone() } else { -x }).sum();
    let nums = arith::positive_divisors(&c[0]);
    let dens = arith::positive_divisors(&c[n]);
    for b in &dens {
        for a0 in &nums {
            if !a0.gcd(b).is_one() {
                continue;
            }
            for a in [a0.clone(), -a0.clone()] {
                let diff = b - &a;
                if !divides(&diff, &p1) {
                    continue;
                }
                let sum = b + &a;
                if !divides(&sum, &pm1) {
                    continue;
                }
                // b^n p(a/b) by Horner over the integers
                let mut acc = Integer::zero();
                let mut bpow = Integer::one();
                for x in c.iter().rev() {
                    acc = acc * &a + x * &bpow;
                    bpow *= b;
                }
                if acc.is_zero() {
                    return Some((a, b.clone()));
                }
            }
        }
    }
    None
}

fn check_divisor_limit(ints: &[Integer]) -> Result<(), PolyError> {
    if ints.len() <= 1 {
        return Ok(());
    }
    for c in [&ints[0], &ints[ints.len() - 1]] {
        if c.abs().to_u64().is_none_or(|v| v > DIVISOR_LIMIT) {
            return Err(PolyError::ConstantTooLarge(c.to_string()));
        }
    }
    Ok(())
}

fn divides(d: &Integer, n: &Integer) -> bool {
    if d.is_zero() {
        n.is_zero()
    } else {
        (n % d).is_zero()
    }
}

// Exact quotient of `c` by `b x - a`.
fn deflate(c: &[Integer], a: &Integer, b: &Integer) -> Vec<Integer> {
    let n = c.len() - 1;
    let mut q = vec![Integer::zero(); n];
    let mut rem = c.to_vec();
    for i in (0..n).rev() {
        let k = &rem[i + 1] / b;
        rem[i] += &k * a;
        q[i] = k;
    }
    q
}

pub(crate) fn monomial(c: &Rational, var: &str, k: usize) -> String {
    let power = match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    };
    if k == 0 {
        return format_rational(c);
    }
    if c.is_one() {
        power
    } else if c.is_integer() {
        format!("{}{power}", c.numer())
    } else {
        format!("({}){power}", format_rational(c))
    }
}

fn quartic_discriminant(a: &Rational, b: &Rational, c: &Rational, d: &Rational, e: &Rational) -> Rational {
    let i = arith::int;
    let p = |x: &Rational, k: usize| num_traits::pow(x.clone(), k);
    i(256) * p(a, 3) * p(e, 3) - i(192) * p(a, 2) * b * d * p(e, 2) - i(128) * p(a, 2) * p(c, 2) * p(e, 2)
        + i(144) * p(a, 2) * c * p(d, 2) * e
        - i(27) * p(a, 2) * p(d, 4)
        + i(144) * a * p(b, 2) * c * p(e, 2)
        - i(6) * a * p(b, 2) * p(d, 2) * e
        - i(80) * a * b * p(c, 2) * d * e
        + i(18) * a * b * c * p(d, 3)
        + i(16) * a * p(c, 4) * e
        - i(4) * a * p(c, 3) * p(d, 2)
        - i(27) * p(b, 4) * p(e, 2)
        + i(18) * p(b, 3) * c * d * e
        - i(4) * p(b, 3) * p(d, 3)
        - i(4) * p(b, 2) * p(c, 3) * e
        + p(b, 2) * p(c, 2) * p(d, 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStructure {
    ThreeDistinctReal,
    OneRealPlusConjugatePair,
    RepeatedRoot,
}

impl fmt::Display for RootStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootStructure::ThreeDistinctReal => "three distinct real roots",
            RootStructure::OneRealPlusConjugatePair => "one real root and a complex-conjugate pair",
            RootStructure::RepeatedRoot => "a repeated root",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicClassification {
    #[serde(with = "arith::serde_rational")]
    pub discriminant: Rational,
    pub root_structure: RootStructure,
}

/// Classifies the depressed cubic `x^3 + p x + q` by `-4p^3 - 27q^2`.
pub fn cubic_classify(p: &Rational, q: &Rational) -> CubicClassification {
    let disc = -arith::int(4) * p * p * p - arith::int(27) * q * q;
    let root_structure = if disc.is_positive() {
        RootStructure::ThreeDistinctReal
    } else if disc.is_negative() {
        RootStructure::OneRealPlusConjugatePair
    } else {
        RootStructure::RepeatedRoot
    };
    CubicClassification { discriminant: disc, root_structure }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let x_plus_1 = Polynomial::from_ints(&[1, 1]);
        let x_minus_1 = Polynomial::from_ints(&[-1, 1]);
        assert_eq!(&x_plus_1 * &x_minus_1, Polynomial::from_ints(&[-1, 0, 1]));
        let p = Polynomial::from_ints(&[3, 0, 2]);
        assert_eq!(&p + &Polynomial::zero(), p);
        let x2 = Polynomial::from_ints(&[0, 0, 1]);
        assert!((&x2 - &x2).is_zero());
        assert_eq!((&x2 - &x2).degree(), None);
    }

    #[test]
    fn rendering() {
        assert_eq!(Polynomial::from_ints(&[2098, -603, 0, 1]).render("X"), "X^3 - 603X + 2098");
        assert_eq!(Polynomial::from_ints(&[0, 0, 0, -1, 2, -3, 1]).render("x"), "x^6 - 3x^5 + 2x^4 - x^3");
        assert_eq!(Polynomial::from_ints(&[1, 0, -1]).render("x"), "-x^2 + 1");
        assert_eq!(Polynomial::new(vec![q("1/2"), q("-1/3")]).render("t"), "-(1/3)t + 1/2");
        assert_eq!(Polynomial::zero().render("x"), "0");
    }

    #[test]
    fn compose_shift_examples() {
        // x^3 + 6x^2 - 591x + 900 with X = x + 2
        let p = Polynomial::from_ints(&[900, -591, 6, 1]);
        assert_eq!(p.depressing_shift(), Some(q("2")));
        assert_eq!(p.compose_shift(&q("2")), Polynomial::from_ints(&[2098, -603, 0, 1]));
        let x2 = Polynomial::from_ints(&[0, 0, 1]);
        assert_eq!(x2.compose_shift(&q("1")), Polynomial::from_ints(&[1, -2, 1]));
        assert_eq!(p.compose_shift(&q("0")), p);
    }

    #[test]
    fn rational_roots_examples() {
        assert_eq!(Polynomial::from_ints(&[-1, 0, 1]).rational_roots().unwrap(), vec![q("-1"), q("1")]);
        let cubic = Polynomial::from_ints(&[-1, 2, -3, 1]);
        assert_eq!(cubic.rational_root_candidates().unwrap(), vec![q("-1"), q("1")]);
        // candidates are ±1 only; evaluate both
        assert_eq!(cubic.eval(&q("1")), q("-1"));
        assert_eq!(cubic.eval(&q("-1")), q("-7"));
        assert!(cubic.rational_roots().unwrap().is_empty());

        let p28 = Polynomial::from_ints(&[2098, -603, 0, 1]);
        let cands = p28.rational_root_candidates().unwrap();
        assert_eq!(cands.len(), 8);
        for c in &cands {
            assert!(!p28.eval(c).is_zero(), "{c} should not be a root");
        }
        assert!(p28.rational_roots().unwrap().is_empty());

        assert_eq!(Polynomial::from_ints(&[-3, 2]).rational_roots().unwrap(), vec![q("3/2")]);
        assert_eq!(Polynomial::zero().rational_roots(), Err(PolyError::ZeroPolynomial));
        assert_eq!(Polynomial::from_ints(&[0, 0, 1]).rational_roots().unwrap(), vec![q("0")]);
    }

    #[test]
    fn cubic_classification_examples() {
        let c = cubic_classify(&q("0"), &q("0"));
        assert_eq!((c.discriminant.clone(), c.root_structure), (q("0"), RootStructure::RepeatedRoot));
        let c = cubic_classify(&q("-1"), &q("0"));
        assert_eq!(c.discriminant, q("4"));
        assert_eq!(c.root_structure, RootStructure::ThreeDistinctReal);
        // -4(-603)^3 - 27*2098^2 with plain integers
        let p: i128 = -603;
        let qq: i128 = 2098;
        let expected = -4 * p * p * p - 27 * qq * qq;
        assert_eq!(expected, 758_181_600);
        let c = cubic_classify(&q("-603"), &q("2098"));
        assert_eq!(c.discriminant, q("758181600"));
        assert_eq!(c.root_structure, RootStructure::ThreeDistinctReal);
    }

    #[test]
    fn ferrari_examples() {
        // x^4 - 5x^2 + 4 = (x^2 - 1)(x^2 - 4)
        let p = Polynomial::from_ints(&[4, 0, -5, 0, 1]);
        let res = p.ferrari_resolvent().unwrap();
        assert!(!res.rational_roots().unwrap().is_empty());
        let (a, b) = p.ferrari_factor().unwrap().expect("factors");
        assert_eq!(&a * &b, p);
        let mut roots: Vec<Rational> =
            a.rational_roots().unwrap().into_iter().chain(b.rational_roots().unwrap()).collect();
        roots.sort();
        assert_eq!(roots, vec![q("-2"), q("-1"), q("1"), q("2")]);

        // x^4 + 1: the resolvent 8m^3 - 8m has roots 0, ±1, but none gives a
        // rational split because 2m and p^2/4 - r are never rational squares.
        let p = Polynomial::from_ints(&[1, 0, 0, 0, 1]);
        let res = p.ferrari_resolvent().unwrap();
        assert_eq!(res, Polynomial::from_ints(&[0, -8, 0, 8]));
        assert_eq!(res.rational_roots().unwrap(), vec![q("-1"), q("0"), q("1")]);
        assert_eq!(p.ferrari_factor().unwrap(), None);

        // x^4: degenerate, repeated root 0
        let p = Polynomial::from_ints(&[0, 0, 0, 0, 1]);
        assert_eq!(p.ferrari_resolvent().unwrap(), Polynomial::from_ints(&[0, 0, 0, 8]));
        let (a, b) = p.ferrari_factor().unwrap().unwrap();
        assert_eq!(&a * &b, p);
        assert_eq!(p.rational_roots().unwrap(), vec![q("0")]);

        assert!(matches!(
            Polynomial::from_ints(&[0, 0, 0, 1, 1]).ferrari_resolvent(),
            Err(PolyError::NotDepressed(_))
        ));
        assert!(matches!(
            Polynomial::from_ints(&[0, 0, 1]).ferrari_resolvent(),
            Err(PolyError::WrongDegree { .. })
        ));
    }

    #[test]
    fn ferrari_splits_non_biquadratic_quartic() {
        // (x^2 + x - 1)(x^2 - x + 3) = x^4 + x^2 + 4x - 3
        let a = Polynomial::from_ints(&[-1, 1, 1]);
        let b = Polynomial::from_ints(&[3, -1, 1]);
        let p = &a * &b;
        assert_eq!(p.coeff(3), q("0"));
        let (f, g) = p.ferrari_factor().unwrap().unwrap();
        assert_eq!(&f * &g, p);
    }

    // discriminant oracle: a^(2n-2) * prod_{i<j} (r_i - r_j)^2
    fn disc_from_roots(lead: &Rational, roots: &[Rational]) -> Rational {
        let n = roots.len();
        let mut acc = num_traits::pow(lead.clone(), 2 * n - 2);
        for i in 0..n {
            for j in i + 1..n {
                let d = &roots[i] - &roots[j];
                acc *= &d * &d;
            }
        }
        acc
    }

    fn from_roots(lead: &Rational, roots: &[Rational]) -> Polynomial {
        roots.iter().fold(Polynomial::constant(lead.clone()), |acc, r| &acc * &Polynomial::linear_root(r))
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..8).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
    }

    proptest! {
        #[test]
        fn discriminant_matches_root_product(
            lead in small_rational().prop_filter("nonzero", |r| !r.is_zero()),
            roots in proptest::collection::vec(small_rational(), 2..=4),
        ) {
            let p = from_roots(&lead, &roots);
            prop_assert_eq!(p.discriminant().unwrap(), disc_from_roots(&lead, &roots));
        }

        #[test]
        fn shift_round_trip(coeffs in proptest::collection::vec(small_rational(), 0..7), c in small_rational()) {
            let p = Polynomial::new(coeffs);
            prop_assert_eq!(p.compose_shift(&c).compose_shift(&-c.clone()), p.clone());
            prop_assert_eq!(p.compose_shift(&c).degree(), p.degree());
        }

        #[test]
        fn planted_roots_recovered(roots in proptest::collection::vec(small_rational(), 1..6)) {
            let p = from_roots(&arith::int(3), &roots);
            let expected: BTreeSet<Rational> = roots.iter().cloned().collect();
            let got: BTreeSet<Rational> = p.rational_roots().unwrap().into_iter().collect();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn degree_of_product(a in proptest::collection::vec(small_rational(), 1..5), b in proptest::collection::vec(small_rational(), 1..5)) {
            let (p, r) = (Polynomial::new(a), Polynomial::new(b));
            if !p.is_zero() && !r.is_zero() {
                prop_assert_eq!((&p * &r).degree(), Some(p.degree().unwrap() + r.degree().unwrap()));
            }
        }

        #[test]
        fn cubic_classify_agrees_with_rational_roots(roots in proptest::collection::vec(-12i64..12, 3)) {
            // depressed cubic with three planted integer roots needs sum zero
            let r3 = -(roots[0] + roots[1]);
            let rs: Vec<Rational> = vec![arith::int(roots[0]), arith::int(roots[1]), arith::int(r3)];
            let p = from_roots(&arith::int(1), &rs);
            let c = cubic_classify(&p.coeff(1), &p.coeff(0));
            let distinct: BTreeSet<_> = rs.iter().cloned().collect();
            if distinct.len() == 3 {
                prop_assert_eq!(c.root_structure, RootStructure::ThreeDistinctReal);
            } else {
                prop_assert_eq!(c.root_structure, RootStructure::RepeatedRoot);
            }
            prop_assert_eq!(c.discriminant, p.discriminant().unwrap());
        }
    }
}
