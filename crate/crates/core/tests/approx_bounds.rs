use lyapsyn_core::approx::ApproxScheme;
use lyapsyn_core::expr::FloatPoint;
use lyapsyn_core::problem::{Bound, Domain, Interval};
use lyapsyn_core::{eval_float, parse_expr, relax, ApproxOrders, FnKind, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 10_000;

/// Count points in the validity interval where the remainder exceeds the bound.
fn violations(scheme: &ApproxScheme, radius: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixed = [0.0, radius, -radius, radius / 2.0];
    let mut bad = Vec::new();
    for i in 0..SAMPLES {
        let x = fixed.get(i).copied().unwrap_or_else(|| rng.gen_range(-radius..=radius));
        let err = (scheme.true_value(x) - scheme.series_f64(x)).abs();
        if err > scheme.bound_f64(x) + 1e-12 {
            bad.push(x);
        }
    }
    bad
}

#[test]
fn builtin_bounds_hold_on_their_validity_regions() {
    let cases = [(FnKind::Exp, 2), (FnKind::Exp, 3), (FnKind::Exp, 5), (FnKind::Sin, 1), (FnKind::Sin, 3), (FnKind::Arctan, 3), (FnKind::Arctan, 5)];
    for (i, (kind, n)) in cases.into_iter().enumerate() {
        let scheme = ApproxScheme::new(kind, n);
        let radius = scheme.validity().radius_f64().unwrap();
        let bad = violations(&scheme, radius, i as u64);
        assert!(bad.is_empty(), "{kind} order {n}: {} violations, e.g. x = {}", bad.len(), bad[0]);
    }
}

#[test]
fn tight_sine_bound_holds_on_a_wide_interval() {
    for n in [1, 3] {
        let scheme = ApproxScheme::new(FnKind::Sin, n).with_tight_sin_bound(true);
        assert!(scheme.validity().radius_f64().is_none());
        assert!(violations(&scheme, 6.0, 100 + u64::from(n)).is_empty());
    }
}

/// The bound really is needed: just past the exp validity radius the
/// guarantee is no longer claimed, and far past it the bound fails.
#[test]
fn exp_bound_fails_far_outside_validity() {
    let scheme = ApproxScheme::new(FnKind::Exp, 2);
    let x = 6.0;
    assert!((scheme.true_value(x) - scheme.series_f64(x)).abs() > scheme.bound_f64(x));
}

#[test]
fn series_coefficients_match_known_expansions() {
    let text = |kind, n| ApproxScheme::new(kind, n).series(&parse_expr("x").unwrap()).to_string();
    assert_eq!(text(FnKind::Exp, 3), parse_expr("1 + x + 1/2*x^2 + 1/6*x^3").unwrap().simplify().to_string());
    assert_eq!(text(FnKind::Sin, 2), parse_expr("x - 1/6*x^3 + 1/120*x^5").unwrap().simplify().to_string());
    assert_eq!(text(FnKind::Arctan, 2), parse_expr("x - 1/3*x^3 + 1/5*x^5").unwrap().simplify().to_string());
}

/// Substituting the true remainder for ε recovers the original expression.
#[test]
fn relaxation_is_exact_at_the_true_remainder() {
    let e = parse_expr("x^2 - exp(x) + 1 + sin(x)*y").unwrap();
    let bounded = |lo: i64, hi: i64| Interval {
        lower: Some(Bound { value: Rational::from(lo), strict: true }),
        upper: Some(Bound { value: Rational::from(hi), strict: true }),
    };
    let domain = Domain { intervals: [("x".to_string(), bounded(-2, 2)), ("y".to_string(), bounded(-1, 1))].into() };
    let orders = ApproxOrders { exp: Some(3), sin: Some(3), ..Default::default() };
    let r = relax(&e, &orders, &domain).unwrap();
    assert_eq!(r.eps_bounds.len(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let x: f64 = rng.gen_range(-2.0..2.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        let mut pt = FloatPoint::default();
        pt.set("x", x);
        pt.set("y", y);
        for b in &r.eps_bounds {
            let scheme = ApproxScheme::new(b.kind, b.order);
            let eps = scheme.true_value(x) - scheme.series_f64(x);
            assert!(eps.abs() <= scheme.bound_f64(x) + 1e-12);
            pt.eps.insert(b.id, eps);
        }
        let want = x * x - x.exp() + 1.0 + x.sin() * y;
        let got = eval_float(&r.rewritten, &pt).unwrap();
        assert!((want - got).abs() < 1e-9, "{want} vs {got}");
    }
}
