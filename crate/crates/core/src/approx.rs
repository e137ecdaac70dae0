//! Polynomial relaxation of transcendental terms.
//!
//! Each occurrence of `exp(x)`, `sin(x)` or `arctan(x)` is replaced by a
//! truncated Taylor polynomial plus a fresh error variable `eps_i` together
//! with a side constraint `|eps_i| <= bound(x)`. The bound holds on the whole
//! validity region of the scheme, so any property proved for every `eps_i`
//! in its box also holds for the true function.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{eval_rational, Expr, FnKind, Point};
use crate::problem::Domain;
use crate::rational::{ceil, Rational};

/// Largest order tried when searching for a default.
const MAX_DEFAULT_ORDER: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("unknown function kind `{0}`")]
    UnknownKind(String),
    #[error(
        "{kind} of order {order} is only valid for {requirement}, but {var} ranges over [{lo}, {hi}]{}",
        match .min_order { Some(n) => format!("; smallest admissible order is {n}"), None => " and no order is admissible".to_string() }
    )]
    Validity {
        kind: FnKind,
        order: u32,
        var: String,
        lo: Rational,
        hi: Rational,
        requirement: String,
        min_order: Option<u32>,
    },
    #[error("argument `{var}` of {kind} has no finite domain bound on both sides")]
    UnboundedArgument { kind: FnKind, var: String },
    #[error("argument of {kind} must be a single state variable, found `{arg}`")]
    NonVariableArgument { kind: FnKind, arg: String },
}

/// Region on which a remainder bound is guaranteed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// `|x| <= radius`
    Radius(Rational),
    /// `|x|^power <= limit`
    PowerBound { power: u32, limit: Rational },
    Everywhere,
}

impl Validity {
    pub fn admits(&self, sup_abs: &Rational) -> bool {
        match self {
            Validity::Radius(r) => sup_abs <= r,
            Validity::PowerBound { power, limit } => &sup_abs.pow(*power) <= limit,
            Validity::Everywhere => true,
        }
    }

    /// Radius of the validity interval as a float, `None` when unbounded.
    pub fn radius_f64(&self) -> Option<f64> {
        match self {
            Validity::Radius(r) => Some(r.to_f64()),
            Validity::PowerBound { power, limit } => Some(limit.to_f64().powf(1.0 / f64::from(*power))),
            Validity::Everywhere => None,
        }
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Radius(r) => write!(f, "|x| <= {r}"),
            Validity::PowerBound { power, limit } => {
                write!(f, "|x|^{power} <= {limit} (|x| <= {:.4})", self.radius_f64().unwrap_or(f64::NAN))
            }
            Validity::Everywhere => f.write_str("all x"),
        }
    }
}

/// Taylor truncation of one function at one order, with its remainder bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxScheme {
    pub kind: FnKind,
    pub order: u32,
    /// Use the Lagrange bound `|x|^(2N+2)/(2N+2)!` for `sin`.
    pub tight_sin_bound: bool,
}

/// Look up a builtin scheme by function name.
pub fn builtin_scheme(kind: &str, order: u32) -> Result<ApproxScheme, ApproxError> {
    let kind: FnKind = kind.parse().map_err(|_| ApproxError::UnknownKind(kind.to_string()))?;
    Ok(ApproxScheme::new(kind, order))
}

impl ApproxScheme {
    pub fn new(kind: FnKind, order: u32) -> Self {
        ApproxScheme { kind, order, tight_sin_bound: false }
    }

    pub fn with_tight_sin_bound(mut self, tight: bool) -> Self {
        self.tight_sin_bound = tight;
        self
    }

    /// Coefficients `(power, coefficient)` of the truncated series.
    pub fn series_terms(&self) -> Vec<(u32, Rational)> {
        let n = self.order;
        match self.kind {
            FnKind::Exp => (0..=n).map(|k| (k, Rational::factorial(k).recip().unwrap())).collect(),
            FnKind::Sin => (0..=n)
                .map(|k| {
                    let p = 2 * k + 1;
                    let c = Rational::factorial(p).recip().unwrap();
                    (p, if k % 2 == 0 { c } else { -c })
                })
                .collect(),
            FnKind::Arctan => (0..=n)
                .map(|k| {
                    let p = 2 * k + 1;
                    let c = Rational::new(1, p);
                    (p, if k % 2 == 0 { c } else { -c })
                })
                .collect(),
        }
    }

    pub fn series(&self, arg: &Expr) -> Expr {
        let terms = self
            .series_terms()
            .into_iter()
            .map(|(p, c)| Expr::product(vec![Expr::Const(c), Expr::pow(arg.clone(), p)]))
            .collect();
        Expr::sum(terms).simplify()
    }

    /// `(power, coefficient)` with `bound(x) = coefficient * |x|^power`.
    pub fn bound_monomial(&self) -> (u32, Rational) {
        let n = self.order;
        match self.kind {
            FnKind::Exp => (n + 1, Rational::from_integer(2) / Rational::factorial(n + 1)),
            FnKind::Sin if self.tight_sin_bound => (2 * n + 2, Rational::factorial(2 * n + 2).recip().unwrap()),
            FnKind::Sin => (n + 1, Rational::factorial(n + 1).recip().unwrap()),
            // Alternating-series remainder, valid for |x| <= 1.
            FnKind::Arctan => (2 * n + 3, Rational::new(1, 2 * n + 3)),
        }
    }

    /// The bound as `|x|^p/d` text.
    pub fn bound_text(&self, var: &str) -> String {
        let (p, c) = self.bound_monomial();
        let num = if c.numer() == &1.into() { String::new() } else { format!("{}*", c.numer()) };
        let den = if c.denom() == &1.into() { String::new() } else { format!("/{}", c.denom()) };
        format!("{num}|{var}|^{p}{den}")
    }

    pub fn bound(&self, arg: &Expr) -> Expr {
        let (p, c) = self.bound_monomial();
        Expr::product(vec![Expr::Const(c), Expr::pow(Expr::abs(arg.clone()), p)]).simplify()
    }

    pub fn validity(&self) -> Validity {
        let n = self.order;
        match self.kind {
            FnKind::Exp => Validity::Radius(Rational::one() + Rational::new(n, 2)),
            FnKind::Sin if self.tight_sin_bound => Validity::Everywhere,
            // |x|^(2N+2)/(2N+2)! is a valid bound everywhere and is below
            // |x|^(N+1)/(N+1)! exactly when |x|^(N+1) <= (2N+2)!/(N+1)!.
            FnKind::Sin => Validity::PowerBound {
                power: n + 1,
                limit: Rational::factorial(2 * n + 2) / Rational::factorial(n + 1),
            },
            FnKind::Arctan => Validity::Radius(Rational::one()),
        }
    }

    pub fn true_value(&self, x: f64) -> f64 {
        self.kind.eval_f64(x)
    }

    pub fn series_f64(&self, x: f64) -> f64 {
        self.series_terms().iter().map(|(p, c)| c.to_f64() * x.powi(*p as i32)).sum()
    }

    pub fn bound_f64(&self, x: f64) -> f64 {
        let (p, c) = self.bound_monomial();
        c.to_f64() * x.abs().powi(p as i32)
    }

    /// Smallest order whose validity region contains `[-sup_abs, sup_abs]`.
    pub fn min_order(kind: FnKind, sup_abs: &Rational, tight_sin_bound: bool) -> Option<u32> {
        match kind {
            FnKind::Exp => {
                // 1 + N/2 >= s  <=>  N >= 2(s - 1)
                let n = ceil(&(Rational::from_integer(2) * (sup_abs - Rational::one())));
                let n: i64 = n.try_into().ok()?;
                u32::try_from(n.max(0)).ok()
            }
            FnKind::Arctan => (sup_abs <= &Rational::one()).then_some(0),
            FnKind::Sin => (0..=MAX_DEFAULT_ORDER).find(|&n| {
                ApproxScheme::new(kind, n).with_tight_sin_bound(tight_sin_bound).validity().admits(sup_abs)
            }),
        }
    }
}

/// Per-kind orders from the problem file. Missing orders default to the
/// smallest valid one for the argument's domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxOrders {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arctan: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tight_sin_bound: bool,
}

impl ApproxOrders {
    pub fn get(&self, kind: FnKind) -> Option<u32> {
        match kind {
            FnKind::Exp => self.exp,
            FnKind::Sin => self.sin,
            FnKind::Arctan => self.arctan,
        }
    }
}

/// One ε-variable: `|eps_id| <= bound`, standing for `f(var) - series(var)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsBound {
    pub id: u32,
    pub kind: FnKind,
    pub var: String,
    pub order: u32,
    pub bound: Expr,
    pub series: Expr,
    /// Closure of the argument's domain interval.
    pub interval: (Rational, Rational),
    pub validity: String,
}

impl EpsBound {
    pub fn eps(&self) -> Expr {
        Expr::Eps(self.id)
    }

    /// Exact membership test `|eps| <= bound(x)` at a point binding both.
    pub fn holds_at(&self, pt: &Point) -> Result<bool, crate::expr::ExprError> {
        let b = eval_rational(&self.bound, pt)?;
        let e = pt.eps(self.id).ok_or_else(|| crate::expr::ExprError::Unbound(format!("eps_{}", self.id)))?;
        Ok(e.abs() <= b)
    }
}

/// Result of relaxing one expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relaxation {
    pub rewritten: Expr,
    pub eps_bounds: Vec<EpsBound>,
}

impl Relaxation {
    pub fn eps_bound(&self, id: u32) -> Option<&EpsBound> {
        self.eps_bounds.iter().find(|b| b.id == id)
    }
}

/// Resolve the order used for `kind` on an argument with closure `[lo, hi]`.
pub fn resolve_order(kind: FnKind, var: &str, lo: &Rational, hi: &Rational, orders: &ApproxOrders) -> Result<ApproxScheme, ApproxError> {
    let sup = lo.abs().max(hi.abs());
    let tight = orders.tight_sin_bound;
    let min = ApproxScheme::min_order(kind, &sup, tight);
    let order = match orders.get(kind).or(min) {
        Some(n) => n,
        None => {
            // No order works; report against order 0.
            let scheme = ApproxScheme::new(kind, 0).with_tight_sin_bound(tight);
            return Err(ApproxError::Validity {
                kind,
                order: 0,
                var: var.to_string(),
                lo: lo.clone(),
                hi: hi.clone(),
                requirement: scheme.validity().to_string(),
                min_order: None,
            });
        }
    };
    let scheme = ApproxScheme::new(kind, order).with_tight_sin_bound(tight);
    let validity = scheme.validity();
    if !validity.admits(&sup) {
        return Err(ApproxError::Validity {
            kind,
            order,
            var: var.to_string(),
            lo: lo.clone(),
            hi: hi.clone(),
            requirement: validity.to_string(),
            min_order: min,
        });
    }
    Ok(scheme)
}

/// Replace every transcendental node by `series + eps` and collect the
/// ε side constraints. Identical occurrences share one ε-variable.
pub fn relax(e: &Expr, orders: &ApproxOrders, domain: &Domain) -> Result<Relaxation, ApproxError> {
    let mut state = RelaxState { orders, domain, table: BTreeMap::new(), bounds: Vec::new() };
    let rewritten = state.rewrite(e)?.simplify();
    debug_assert!(!rewritten.has_transcendental());
    Ok(Relaxation { rewritten, eps_bounds: state.bounds })
}

struct RelaxState<'a> {
    orders: &'a ApproxOrders,
    domain: &'a Domain,
    table: BTreeMap<(FnKind, String), u32>,
    bounds: Vec<EpsBound>,
}

impl RelaxState<'_> {
    fn rewrite(&mut self, e: &Expr) -> Result<Expr, ApproxError> {
        let kind = match e {
            Expr::Exp(_) => Some(FnKind::Exp),
            Expr::Sin(_) => Some(FnKind::Sin),
            Expr::Arctan(_) => Some(FnKind::Arctan),
            _ => None,
        };
        if let Some(kind) = kind {
            let arg = e.children()[0].simplify();
            let Expr::Var(var) = &arg else {
                return Err(ApproxError::NonVariableArgument { kind, arg: arg.to_string() });
            };
            let id = self.eps_for(kind, var)?;
            let bound = &self.bounds[id as usize];
            return Ok(Expr::sum(vec![bound.series.clone(), Expr::Eps(id)]));
        }
        Ok(match e {
            Expr::Sum(cs) => Expr::Sum(cs.iter().map(|c| self.rewrite(c)).collect::<Result<_, _>>()?),
            Expr::Product(cs) => Expr::Product(cs.iter().map(|c| self.rewrite(c)).collect::<Result<_, _>>()?),
            Expr::Pow(b, n) => Expr::pow(self.rewrite(b)?, *n),
            Expr::Neg(c) => Expr::neg(self.rewrite(c)?),
            Expr::Abs(c) => Expr::abs(self.rewrite(c)?),
            _ => e.clone(),
        })
    }

    fn eps_for(&mut self, kind: FnKind, var: &str) -> Result<u32, ApproxError> {
        if let Some(id) = self.table.get(&(kind, var.to_string())) {
            return Ok(*id);
        }
        let (lo, hi) = self
            .domain
            .closure(var)
            .ok_or_else(|| ApproxError::UnboundedArgument { kind, var: var.to_string() })?;
        let scheme = resolve_order(kind, var, &lo, &hi, self.orders)?;
        let arg = Expr::var(var);
        let id = self.bounds.len() as u32;
        self.bounds.push(EpsBound {
            id,
            kind,
            var: var.to_string(),
            order: scheme.order,
            bound: scheme.bound(&arg),
            series: scheme.series(&arg),
            interval: (lo, hi),
            validity: scheme.validity().to_string(),
        });
        self.table.insert((kind, var.to_string()), id);
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, parse_expr_with_params};
    use crate::problem::{Bound, Interval};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn domain(entries: &[(&str, &str, &str)]) -> Domain {
        let mut d = Domain::default();
        for (v, lo, hi) in entries {
            d.intervals.insert(
                v.to_string(),
                Interval { lower: Some(Bound { value: q(lo), strict: true }), upper: Some(Bound { value: q(hi), strict: true }) },
            );
        }
        d
    }

    #[test]
    fn exp_order_three() {
        let s = builtin_scheme("exp", 3).unwrap();
        let x = Expr::var("x");
        assert_eq!(s.series(&x), parse_expr("1 + x + 1/2*x^2 + 1/6*x^3").unwrap().simplify());
        assert_eq!(s.bound(&x), parse_expr("1/12*x^4").unwrap());
        assert_eq!(s.validity(), Validity::Radius(q("5/2")));
    }

    #[test]
    fn bound_text() {
        assert_eq!(builtin_scheme("exp", 3).unwrap().bound_text("x"), "|x|^4/12");
        assert_eq!(builtin_scheme("sin", 3).unwrap().bound_text("x1"), "|x1|^4/24");
        assert_eq!(builtin_scheme("arctan", 5).unwrap().bound_text("x2"), "|x2|^13/13");
        assert_eq!(builtin_scheme("sin", 0).unwrap().bound_text("y"), "|y|^1");
    }

    #[test]
    fn sin_order_three() {
        let s = builtin_scheme("sin", 3).unwrap();
        let x = Expr::var("x");
        assert_eq!(s.series(&x), parse_expr("x - 1/6*x^3 + 1/120*x^5 - 1/5040*x^7").unwrap().simplify());
        assert_eq!(s.bound(&x), parse_expr("1/24*x^4").unwrap());
        assert!(s.validity().admits(&q("3")));
        assert!(!s.validity().admits(&q("7")));
    }

    #[test]
    fn tight_sin_bound_is_global() {
        let s = ApproxScheme::new(FnKind::Sin, 3).with_tight_sin_bound(true);
        assert_eq!(s.bound(&Expr::var("x")), parse_expr("1/40320*x^8").unwrap());
        assert_eq!(s.validity(), Validity::Everywhere);
    }

    #[test]
    fn arctan_order_five() {
        let s = builtin_scheme("arctan", 5).unwrap();
        assert_eq!(s.bound_monomial(), (13, q("1/13")));
        assert_eq!(s.bound(&Expr::var("x")), parse_expr("1/13*x^12*abs(x)").unwrap());
        assert_eq!(s.validity(), Validity::Radius(q("1")));
    }

    #[test]
    fn unknown_kind() {
        assert_eq!(builtin_scheme("cos", 2), Err(ApproxError::UnknownKind("cos".into())));
    }

    #[test]
    fn odd_exp_bound_keeps_abs() {
        let s = builtin_scheme("exp", 2).unwrap();
        assert_eq!(s.bound(&Expr::var("x")), parse_expr("1/3*x^2*abs(x)").unwrap());
    }

    #[test]
    fn min_orders() {
        assert_eq!(ApproxScheme::min_order(FnKind::Exp, &q("2"), false), Some(2));
        assert_eq!(ApproxScheme::min_order(FnKind::Exp, &q("1/2"), false), Some(0));
        assert_eq!(ApproxScheme::min_order(FnKind::Exp, &q("21/10"), false), Some(3));
        assert_eq!(ApproxScheme::min_order(FnKind::Arctan, &q("1"), false), Some(0));
        assert_eq!(ApproxScheme::min_order(FnKind::Arctan, &q("2"), false), None);
        assert_eq!(ApproxScheme::min_order(FnKind::Sin, &q("3"), false), Some(1));
    }

    #[test]
    fn relax_scalar_exp_system() {
        let e = parse_expr_with_params("2*p*x*(x^2 + 1 - exp(x))", &["p"]).unwrap();
        let orders = ApproxOrders { exp: Some(2), ..Default::default() };
        let r = relax(&e, &orders, &domain(&[("x", "-2", "2")])).unwrap();
        let expected = parse_expr_with_params("2*p*x*(x^2 + 1 - (1 + x + 1/2*x^2) - eps_0)", &["p"]).unwrap();
        let expected = expected.map_leaves(&|l| match l {
            Expr::Var(n) if n == "eps_0" => Some(Expr::Eps(0)),
            _ => None,
        });
        assert_eq!(r.rewritten, expected.simplify());
        assert_eq!(r.eps_bounds.len(), 1);
        assert_eq!(r.eps_bounds[0].bound, parse_expr("1/3*x^2*abs(x)").unwrap());
        assert!(!r.rewritten.has_transcendental());
    }

    #[test]
    fn relax_rejects_low_exp_order() {
        let e = parse_expr("exp(x)").unwrap();
        let orders = ApproxOrders { exp: Some(1), ..Default::default() };
        match relax(&e, &orders, &domain(&[("x", "-2", "2")])) {
            Err(ApproxError::Validity { order: 1, min_order: Some(2), requirement, .. }) => {
                assert_eq!(requirement, "|x| <= 3/2");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relax_without_transcendentals_is_identity() {
        let e = parse_expr("x1 + x2").unwrap();
        let r = relax(&e, &ApproxOrders::default(), &Domain::default()).unwrap();
        assert_eq!(r.rewritten, e);
        assert!(r.eps_bounds.is_empty());
    }

    #[test]
    fn relax_shares_identical_occurrences() {
        let e = parse_expr("sin(x)*y + sin(x)^2 + exp(y)").unwrap();
        let orders = ApproxOrders { sin: Some(1), exp: Some(2), ..Default::default() };
        let r = relax(&e, &orders, &domain(&[("x", "-1", "1"), ("y", "-1", "1")])).unwrap();
        assert_eq!(r.eps_bounds.len(), 2);
        assert_eq!(r.rewritten.eps_ids().len(), 2);
    }

    #[test]
    fn relax_errors() {
        let orders = ApproxOrders::default();
        assert!(matches!(
            relax(&parse_expr("sin(x)").unwrap(), &orders, &Domain::default()),
            Err(ApproxError::UnboundedArgument { .. })
        ));
        assert!(matches!(
            relax(&parse_expr("sin(2*x)").unwrap(), &orders, &domain(&[("x", "-1", "1")])),
            Err(ApproxError::NonVariableArgument { .. })
        ));
        assert!(matches!(
            relax(&parse_expr("arctan(x)").unwrap(), &orders, &domain(&[("x", "-2", "1")])),
            Err(ApproxError::Validity { min_order: None, .. })
        ));
    }

    #[test]
    fn default_order_is_minimal_valid() {
        let r = relax(&parse_expr("exp(x)").unwrap(), &ApproxOrders::default(), &domain(&[("x", "-2", "2")])).unwrap();
        assert_eq!(r.eps_bounds[0].order, 2);
    }
}
