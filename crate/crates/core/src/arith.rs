//! Exact integer and rational arithmetic.
//!
//! `Integer` and `Rational` are the `num` big-number types; this module adds
//! the root-extraction and perfect-power predicates the rest of the crate
//! relies on. Every root test is answered with integer arithmetic only.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Integer = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("square root of negative integer {0}")]
    NegativeSqrt(Integer),
    #[error("even root (index {k}) of negative value {value}")]
    EvenRootOfNegative { value: String, k: u32 },
    #[error("root index must be at least 2, got {0}")]
    InvalidRootIndex(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as an exact rational (expected `p` or `p/q`)")]
    Parse(String),
}

/// Floor of the square root, by Newton iteration from a bit-length guess.
pub fn isqrt(n: &Integer) -> Result<Integer, ArithError> {
    if n.is_negative() {
        return Err(ArithError::NegativeSqrt(n.clone()));
    }
    Ok(floor_root(n, 2))
}

// Newton iteration for floor(n^(1/k)), n >= 0. The starting point
// 2^ceil(bits/k) is at or above the root, so the iterates decrease
// monotonically until they stop at the floor.
fn floor_root(n: &Integer, k: u32) -> Integer {
    if n.is_zero() || n.is_one() {
        return n.clone();
    }
    let bits = n.bits();
    let k64 = u64::from(k);
    let mut x = Integer::one() << bits.div_ceil(k64);
    let k_big = Integer::from(k);
    let k_minus_one = Integer::from(k - 1);
    loop {
        let y = (&k_minus_one * &x + n / x.pow(k - 1)) / &k_big;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Returns `r` with `r^k == n` when such an integer exists.
///
/// For even `k` the nonnegative root is returned and `n` must be nonnegative.
pub fn perfect_power_root(n: &Integer, k: u32) -> Result<Option<Integer>, ArithError> {
    if k < 2 {
        return Err(ArithError::InvalidRootIndex(k));
    }
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return Err(ArithError::EvenRootOfNegative { value: n.to_string(), k });
        }
        return Ok(perfect_power_root(&-n, k)?.map(|r| -r));
    }
    let r = floor_root(n, k);
    Ok((r.pow(k) == *n).then_some(r))
}

/// Exact rational k-th root: `a/b` in lowest terms is a k-th power iff both
/// `a` and `b` are.
pub fn rational_kth_root(q: &Rational, k: u32) -> Result<Option<Rational>, ArithError> {
    if k < 2 {
        return Err(ArithError::InvalidRootIndex(k));
    }
    if q.is_negative() && k.is_multiple_of(2) {
        return Err(ArithError::EvenRootOfNegative { value: format_rational(q), k });
    }
    let Some(num) = perfect_power_root(q.numer(), k)? else {
        return Ok(None);
    };
    let Some(den) = perfect_power_root(q.denom(), k)? else {
        return Ok(None);
    };
    Ok(Some(Rational::new(num, den)))
}

/// `true` iff `q` is the square of a rational. Negative values are not squares.
pub fn is_rational_square(q: &Rational) -> bool {
    !q.is_negative() && matches!(rational_kth_root(q, 2), Ok(Some(_)))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, ArithError> {
    if b.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(a / b)
}

/// Builds `num/den` in lowest terms with a positive denominator.
pub fn ratio(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Rational, ArithError> {
    let den = den.into();
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(Rational::new(num.into(), den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(Integer::from(n))
}

/// Height of `a/b` in lowest terms: `max(|a|, b)`.
pub fn height(q: &Rational) -> Integer {
    let a = q.numer().abs();
    let b = q.denom().clone();
    a.max(b)
}

/// Parses `p` or `p/q` with optional leading minus. Decimal and exponent
/// notations are rejected so that every input stays exact.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let bad = || ArithError::Parse(s.to_string());
    let s_trim = s.trim();
    let (num_s, den_s) = match s_trim.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s_trim, None),
    };
    let parse_int = |t: &str, allow_sign: bool| -> Result<Integer, ArithError> {
        let digits = if allow_sign { t.strip_prefix('-').unwrap_or(t) } else { t };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<Integer>().map_err(|_| bad())
    };
    let num = parse_int(num_s, true)?;
    let den = match den_s {
        Some(d) => parse_int(d, false)?,
        None => Integer::one(),
    };
    if den.is_zero() {
        return Err(ArithError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Canonical text: `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Wrapper giving `Rational` its canonical `p/q` text in `Display`.
pub struct Q<'a>(pub &'a Rational);

impl fmt::Display for Q<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// All positive divisors of `n != 0`, ascending, from a trial-division
/// factorization.
pub fn positive_divisors(n: &Integer) -> Vec<Integer> {
    let mut n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    if let Some(small) = n.to_u64() {
        return small_divisors(small).into_iter().map(Integer::from).collect();
    }
    let mut divisors = vec![Integer::one()];
    let mut p = Integer::from(2u32);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            let base = divisors.clone();
            let mut pk = Integer::one();
            for _ in 0..e {
                pk *= &p;
                divisors.extend(base.iter().map(|d| d * &pk));
            }
        }
        p += 1u32;
    }
    if !n.is_one() {
        let base = divisors.clone();
        divisors.extend(base.into_iter().map(|d| d * &n));
    }
    divisors.sort();
    divisors
}

fn small_divisors(mut n: u64) -> Vec<u64> {
    let mut divisors = vec![1u64];
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            let base = divisors.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divisors.extend(base.iter().map(|d| d * pk));
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let base = divisors.clone();
        divisors.extend(base.into_iter().map(|d| d * n));
    }
    divisors.sort_unstable();
    divisors
}

pub fn sign_char(q: &Rational) -> &'static str {
    match q.numer().sign() {
        Sign::Minus => "negative",
        Sign::NoSign => "zero",
        Sign::Plus => "positive",
    }
}

/// Serde adapter storing rationals as canonical strings.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
