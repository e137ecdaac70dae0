use std::collections::BTreeMap;

use lyapsyn_core::expr::FloatPoint;
use lyapsyn_core::{differentiate, eval_float, eval_rational, parse_expr, Expr, Point, Rational};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n, d))
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        small_rational().prop_map(Expr::Const),
    ]
}

/// Polynomials in `x`, `y` built from raw nodes, so simplification has work to do.
fn poly() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
            (inner.clone(), 0u32..4).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
            inner.prop_map(|e| Expr::Neg(Box::new(e))),
        ]
    })
}

fn poly_with_abs() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
            (inner.clone(), 0u32..4).prop_map(|(b, k)| Expr::Pow(Box::new(b), k)),
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            inner.prop_map(|e| Expr::Abs(Box::new(e))),
        ]
    })
}

fn point() -> impl Strategy<Value = Point> {
    (small_rational(), small_rational()).prop_map(|(x, y)| Point::from_pairs([("x", x), ("y", y)]))
}

fn at(pt: &Point, var: &str, value: Rational) -> Point {
    let mut out = pt.clone();
    out.set(var, value);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(e in poly_with_abs(), pt in point()) {
        let printed = e.to_string();
        let reparsed = parse_expr(&printed).unwrap();
        prop_assert_eq!(eval_rational(&reparsed, &pt).unwrap(), eval_rational(&e, &pt).unwrap());
        let canon = e.simplify();
        prop_assert_eq!(parse_expr(&canon.to_string()).unwrap().simplify(), canon);
    }

    #[test]
    fn simplify_preserves_value(e in poly_with_abs(), pt in point()) {
        prop_assert_eq!(eval_rational(&e.simplify(), &pt).unwrap(), eval_rational(&e, &pt).unwrap());
    }

    #[test]
    fn simplify_is_idempotent(e in poly_with_abs()) {
        let once = e.simplify();
        prop_assert_eq!(once.simplify(), once);
    }

    #[test]
    fn substitution_commutes_with_eval(e in poly(), g in poly(), pt in point()) {
        let bindings = BTreeMap::from([("x".to_string(), g.clone())]);
        let lhs = eval_rational(&e.substitute(&bindings), &pt).unwrap();
        let gx = eval_rational(&g, &pt).unwrap();
        prop_assert_eq!(lhs, eval_rational(&e, &at(&pt, "x", gx)).unwrap());
    }

    #[test]
    fn derivative_is_linear(a in poly(), b in poly(), c in small_rational(), pt in point()) {
        let combo = Expr::sum(vec![Expr::product(vec![Expr::Const(c.clone()), a.clone()]), b.clone()]);
        let lhs = eval_rational(&differentiate(&combo, "x").unwrap(), &pt).unwrap();
        let da = eval_rational(&differentiate(&a, "x").unwrap(), &pt).unwrap();
        let db = eval_rational(&differentiate(&b, "x").unwrap(), &pt).unwrap();
        prop_assert_eq!(lhs, c * da + db);
    }

    #[test]
    fn float_and_exact_eval_agree(e in poly(), pt in point()) {
        let mut fp = FloatPoint::default();
        for (k, v) in &pt.values {
            fp.set(k.clone(), v.to_f64());
        }
        let exact = eval_rational(&e, &pt).unwrap().to_f64();
        let float = eval_float(&e, &fp).unwrap();
        prop_assert!((exact - float).abs() <= 1e-9 * exact.abs().max(1.0), "{} vs {}", exact, float);
    }

    #[test]
    fn rational_text_round_trip(r in small_rational()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }
}

/// Exact symmetric difference quotient against the symbolic derivative.
/// For polynomials the quotient error is O(h^2), far below the tolerance.
#[test]
fn derivative_matches_central_difference() {
    use proptest::strategy::ValueTree;
    use rand::{Rng, SeedableRng};
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let h = Rational::new(1, 100_000);
    let two_h = Rational::from(2) * h.clone();
    let mut checked = 0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    while checked < 200 {
        let e = poly().new_tree(&mut runner).unwrap().current();
        let pt = Point::from_pairs([
            ("x", Rational::new(rng.gen_range(-200..=200), 100)),
            ("y", Rational::new(rng.gen_range(-200..=200), 100)),
        ]);
        for var in ["x", "y"] {
            let x0 = pt.get(var).unwrap().clone();
            let plus = eval_rational(&e, &at(&pt, var, x0.clone() + h.clone())).unwrap();
            let minus = eval_rational(&e, &at(&pt, var, x0 - h.clone())).unwrap();
            let fd = ((plus - minus) / two_h.clone()).to_f64();
            let d = eval_rational(&differentiate(&e, var).unwrap(), &pt).unwrap().to_f64();
            assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "d/d{var} of {e} at {pt:?}: {d} vs {fd}");
        }
        checked += 1;
    }
}
