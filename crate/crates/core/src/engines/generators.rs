//! Closed-form generators and small decomposition searches.

use num_integer::Integer as _;
use num_traits::{One, Signed};

use crate::arith::{self, Integer, Rational};
use crate::catalog::{default_catalog, get_problem, ProblemSpec};
use crate::expr::Assignment;
use crate::verify::{verify_solution, BoundKind, Bounds, Certificate, Outcome, SolutionRecord};

/// Catalog entry asking for `x` with `x^2 + n` and `x^2 - n` both squares.
pub const CONGRUUM_PROBLEM: u32 = 18;

/// Primitive triple `(m^2 - n^2, 2mn, m^2 + n^2)` for coprime `m > n >= 1`
/// of opposite parity.
pub fn euclid_triple(m: u64, n: u64) -> Option<(u64, u64, u64)> {
    if n == 0 || m <= n || (m - n).is_multiple_of(2) || m.gcd(&n) != 1 {
        return None;
    }
    Some((m * m - n * n, 2 * m * n, m * m + n * n))
}

/// All primitive triples with hypotenuse at most `limit`, ordered by
/// hypotenuse then first leg.
pub fn euclid_triples(limit: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut m = 2;
    while m * m < limit {
        for n in 1..m {
            if let Some(t) = euclid_triple(m, n) {
                if t.2 <= limit {
                    out.push(t);
                }
            }
        }
        m += 1;
    }
    out.sort_by_key(|&(a, _, c)| (c, a));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruum {
    pub r: Integer,
    pub s: Integer,
    pub t: Integer,
    pub k: Integer,
}

impl Congruum {
    /// `x = s/k`, for which `x^2 - n = (r/k)^2` and `x^2 + n = (t/k)^2`.
    pub fn x(&self) -> Rational {
        Rational::new(self.s.clone(), self.k.clone())
    }
}

/// Smallest `k <= k_bound` admitting squares `r^2 < s^2 < t^2` in arithmetic
/// progression with difference `n k^2`; within one `k`, smallest `s - r`.
pub fn congruum(n: u64, k_bound: u64) -> Option<Congruum> {
    if n == 0 {
        return None;
    }
    for k in 1..=k_bound {
        let kk = Integer::from(k);
        let m = Integer::from(n) * &kk * &kk;
        for d in arith::positive_divisors(&m) {
            let e = &m / &d;
            if d >= e || d.is_odd() != e.is_odd() {
                continue;
            }
            let s: Integer = (&d + &e) / 2;
            let r: Integer = (&e - &d) / 2;
            let t2 = &s * &s + &m;
            if let Ok(Some(t)) = arith::perfect_power_root(&t2, 2) {
                return Some(Congruum { r, s, t, k: kk });
            }
        }
    }
    None
}

/// [`congruum`] packaged as a certificate for the congruence problem of the
/// bundled catalog with `n` bound.
pub fn congruum_search(n: u64, k_bound: u64) -> Certificate {
    let c = default_catalog();
    let p = get_problem(&c, CONGRUUM_PROBLEM).expect("bundled catalog has the congruence problem");
    let bindings = Assignment::new().with("n", arith::int(n as i64));
    congruum_certificate(p, &bindings, n, k_bound)
}

pub fn congruum_certificate(p: &ProblemSpec, bindings: &Assignment, n: u64, k_bound: u64) -> Certificate {
    let mut cert = Certificate::new(p.id, "congruum_search", bindings.clone());
    cert.bounds = Some(Bounds { kind: BoundKind::KBound, value: k_bound, unknowns: p.unknowns.clone() });
    match congruum(n, k_bound) {
        Some(hit) => {
            let a = Assignment::new().with(&p.unknowns[0], hit.x());
            if verify_solution(p, bindings, &a).is_ok_and(|r| r.holds()) {
                cert.notes.push(format!(
                    "squares {}^2, {}^2, {}^2 in progression with difference {n}*{}^2 = {}",
                    hit.r,
                    hit.s,
                    hit.t,
                    hit.k,
                    Integer::from(n) * &hit.k * &hit.k
                ));
                cert.solutions.push(SolutionRecord { values: a, degenerate: false });
                cert.outcome = Outcome::SolutionsFound;
            }
        }
        None => {
            cert.notes.push(format!("no progression r^2 < s^2 < t^2 with difference {n}*k^2 for k <= {k_bound}"));
        }
    }
    cert.notes.push(format!("covers every x = s/k with k <= {k_bound}"));
    cert
}

/// All `0 <= x <= y <= bound` with `x^3 + y^3 = n`.
pub fn sum_two_cubes(n: &Integer, bound: u64) -> Vec<(Integer, Integer)> {
    let mut out = Vec::new();
    for x in 0..=bound {
        let xi = Integer::from(x);
        let rest = n - &xi * &xi * &xi;
        if rest.is_negative() {
            break;
        }
        if let Ok(Some(y)) = arith::perfect_power_root(&rest, 3) {
            if y >= xi && y <= Integer::from(bound) {
                out.push((xi, y));
            }
        }
    }
    out
}

/// All `x, y >= 0` with `x <= bound` and `x^3 + y^2 = n`.
pub fn cube_plus_square(n: &Integer, bound: u64) -> Vec<(Integer, Integer)> {
    let mut out = Vec::new();
    for x in 0..=bound {
        let xi = Integer::from(x);
        let rest = n - &xi * &xi * &xi;
        if rest.is_negative() {
            break;
        }
        if let Ok(Some(y)) = arith::perfect_power_root(&rest, 2) {
            out.push((xi, y));
        }
    }
    out
}

/// `(cbrt(a), 1, 1)` when `a` is the cube of a rational.
pub fn product_of_cubes(a: &Rational) -> Option<(Rational, Rational, Rational)> {
    let root = arith::rational_kth_root(a, 3).ok()??;
    Some((root, Rational::one(), Rational::one()))
}

/// The salary `x` with `(x/30) sqrt(x) = a`, i.e. `x^3 = 900 a^2`, when rational.
pub fn salary_problem(a: &Rational) -> Option<Rational> {
    if !a.is_positive() {
        return None;
    }
    let cube = arith::int(900) * a * a;
    let x = arith::rational_kth_root(&cube, 3).ok()??;
    let root = arith::rational_kth_root(&x, 2).ok()??;
    (&x * &root / arith::int(30) == *a).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> Integer {
        Integer::from(n)
    }

    #[test]
    fn euclid_examples() {
        assert_eq!(euclid_triple(2, 1), Some((3, 4, 5)));
        assert_eq!(euclid_triple(3, 2), Some((5, 12, 13)));
        assert_eq!(euclid_triple(3, 1), None);
        let ts = euclid_triples(30);
        assert_eq!(ts, [(3, 4, 5), (5, 12, 13), (15, 8, 17), (7, 24, 25), (21, 20, 29)]);
        for (a, b, c) in euclid_triples(2000) {
            assert_eq!(a * a + b * b, c * c);
            assert_eq!(a.gcd(&b), 1);
        }
    }

    #[test]
    fn congruum_examples() {
        assert_eq!(congruum(6, 2), Some(Congruum { r: big(1), s: big(5), t: big(7), k: big(2) }));
        let five = congruum(5, 12).unwrap();
        assert_eq!((five.r, five.s, five.t, five.k), (big(31), big(41), big(49), big(12)));
        assert_eq!(congruum(10, 50), None);
    }

    #[test]
    fn congruum_certificates() {
        let c = congruum_search(5, 12);
        assert_eq!(c.outcome, Outcome::SolutionsFound);
        assert_eq!(c.solutions[0].values.get("x"), Some(&arith::ratio(41, 12).unwrap()));
        assert_eq!(congruum_search(10, 50).outcome, Outcome::NoneBelowBound);
    }

    #[test]
    fn cube_decompositions() {
        assert_eq!(sum_two_cubes(&big(1729), 13), [(big(1), big(12)), (big(9), big(10))]);
        assert_eq!(sum_two_cubes(&big(2), 1), [(big(1), big(1))]);
        assert!(sum_two_cubes(&big(7), 10).is_empty());
        assert!(cube_plus_square(&big(17), 17).contains(&(big(2), big(3))));
        assert_eq!(cube_plus_square(&big(1), 5), [(big(0), big(1)), (big(1), big(0))]);
        assert!(cube_plus_square(&big(6), 6).is_empty());
    }

    #[test]
    fn multiplicative_examples() {
        let q = |s: &str| arith::parse_rational(s).unwrap();
        assert_eq!(product_of_cubes(&q("216")), Some((q("6"), q("1"), q("1"))));
        assert_eq!(product_of_cubes(&q("1")), Some((q("1"), q("1"), q("1"))));
        assert_eq!(product_of_cubes(&q("2")), None);
        assert_eq!(salary_problem(&q("30")), None);
        assert_eq!(salary_problem(&q("9/10")), Some(q("9")));
        assert_eq!(salary_problem(&q("3/10")), None);
    }
}
