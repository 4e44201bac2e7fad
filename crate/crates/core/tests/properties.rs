use std::collections::BTreeSet;

use dirham::arith::{self, Rational};
use dirham::catalog::{default_catalog, get_problem, parse_catalog, to_json};
use dirham::engines;
use dirham::expr::{check_relations, eval, substitute, Assignment, Expr};
use dirham::verify::{emit_certificate, parse_certificate, verify_solution, Outcome};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..20).prop_map(|(a, b)| arith::ratio(a, b).unwrap())
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        arb_rational().prop_map(Expr::Const),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::param("n")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), 0u32..3).prop_map(|(a, k)| Expr::pow(a, k)),
            (inner, 2u32..4).prop_map(|(a, k)| Expr::root(a, k)),
        ]
    })
}

fn is_rational_square(q: &Rational) -> bool {
    !q.is_negative() && arith::rational_kth_root(q, 2).unwrap().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a - &a, Rational::zero());
        if !b.is_zero() {
            prop_assert_eq!(&a / &b * &b, a.clone());
        }
    }

    #[test]
    fn eval_commutes_with_substitution(e in arb_expr(), r in arb_expr(), x in arb_rational(), y in arb_rational(), n in arb_rational()) {
        let a = Assignment::new().with("x", x.clone()).with("y", y).with("n", n);
        let substituted = eval(&substitute(&e, "x", &r), &a).unwrap();
        match eval(&r, &a).unwrap() {
            Some(v) => {
                let direct = eval(&e, &a.clone().with("x", v)).unwrap();
                prop_assert_eq!(substituted, direct);
            }
            None => {
                if e.mentions("x") {
                    prop_assert!(substituted.is_none());
                }
            }
        }
    }

    #[test]
    fn relation_checks_are_deterministic(id in 1u32..34, x in arb_rational(), y in arb_rational(), n in 1i64..100) {
        let cat = default_catalog();
        let p = get_problem(&cat, id).unwrap();
        prop_assume!(!p.is_missing());
        let mut a = Assignment::new().with("x", x).with("y", y);
        for name in p.parameter_names() {
            a.set(name, arith::int(n));
        }
        let first = check_relations(&p.relations, &a);
        let second = check_relations(&p.relations, &a);
        prop_assert_eq!(first.is_ok(), second.is_ok());
        if let (Ok(f), Ok(s)) = (first, second) {
            prop_assert_eq!(f, s);
        }
    }

    #[test]
    fn congruum_is_sound(n in 1u64..80, k_bound in 1u64..30) {
        if let Some(c) = engines::congruum(n, k_bound) {
            let step = arith::Integer::from(n) * &c.k * &c.k;
            prop_assert_eq!(&c.s * &c.s - &c.r * &c.r, step.clone());
            prop_assert_eq!(&c.t * &c.t - &c.s * &c.s, step);
            let x = c.x();
            let nq = arith::int(n as i64);
            prop_assert!(is_rational_square(&(&x * &x + &nq)));
            prop_assert!(is_rational_square(&(&x * &x - &nq)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smaller_bounds_find_subsets(n in 1i64..400, lo in 1u64..12, extra in 0u64..12) {
        for id in [26u32, 27] {
            let p = get_problem(&default_catalog(), id).unwrap().clone();
            let b = Assignment::new().with("n", arith::int(n));
            let small = engines::search_integer(&p, &b, lo, Some(1)).unwrap();
            let large = engines::search_integer(&p, &b, lo + extra, Some(2)).unwrap();
            let big: BTreeSet<_> = large.solutions.iter().map(|s| format!("{:?}", s.values)).collect();
            for s in &small.solutions {
                let key = format!("{:?}", s.values);
                prop_assert!(big.contains(&key), "{} missing at larger bound", key);
            }
            for s in small.solutions.iter().chain(&large.solutions) {
                prop_assert!(verify_solution(&p, &b, &s.values).unwrap().holds());
            }
            if small.outcome == Outcome::SolutionsFound {
                prop_assert_eq!(large.outcome, Outcome::SolutionsFound);
            }
        }
    }

    #[test]
    fn certificates_round_trip(n in 1i64..200, bound in 1u64..15) {
        let p = get_problem(&default_catalog(), 27).unwrap().clone();
        let b = Assignment::new().with("n", arith::int(n));
        let cert = engines::search_integer(&p, &b, bound, None).unwrap();
        let json = emit_certificate(&cert, "json").unwrap();
        prop_assert_eq!(parse_certificate(&json).unwrap(), cert);
    }
}

#[test]
fn catalog_round_trips() {
    let cat = default_catalog();
    let again = parse_catalog(&to_json(&cat)).unwrap();
    assert_eq!(again, cat);
}
