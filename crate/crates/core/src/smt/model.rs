//! Model values: numerals, decimals, `(- ..)`, `(/ ..)` and algebraic
//! `root-obj` numbers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::Serialize;

use super::sexpr::SExpr;
use super::SmtError;
use crate::rational::Rational;

/// A satisfying assignment. Algebraic irrationals are replaced by nearby
/// rationals and their names recorded in `approximated`; callers must
/// re-check anything derived from those.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Model {
    pub values: BTreeMap<String, Rational>,
    pub approximated: BTreeSet<String>,
}

impl Model {
    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn is_exact(&self) -> bool {
        self.approximated.is_empty()
    }
}

enum Value {
    Exact(Rational),
    Approx(Rational),
}

/// Parse a `(get-model)` response. Accepts both `(model ...)` and the bare
/// list of `define-fun`s.
pub fn parse_model(sx: &SExpr) -> Result<Model, SmtError> {
    let items = sx.list().ok_or_else(|| malformed(sx, "model is not a list"))?;
    let items = match items.first().and_then(SExpr::atom) {
        Some("model") => &items[1..],
        _ => items,
    };
    let mut model = Model::default();
    for item in items {
        let parts = item.list().ok_or_else(|| malformed(item, "model entry is not a list"))?;
        if parts.first().and_then(SExpr::atom) != Some("define-fun") || parts.len() != 5 {
            return Err(malformed(item, "expected (define-fun name () Sort value)"));
        }
        let name = parts[1].atom().ok_or_else(|| malformed(item, "name is not a symbol"))?;
        if parts[2].list().is_none_or(|args| !args.is_empty()) {
            // Function definitions never appear for our constant-only scripts.
            continue;
        }
        match parse_value(&parts[4])? {
            Value::Exact(r) => {
                model.values.insert(name.to_string(), r);
            }
            Value::Approx(r) => {
                model.values.insert(name.to_string(), r);
                model.approximated.insert(name.to_string());
            }
        }
    }
    Ok(model)
}

fn malformed(sx: &SExpr, msg: &str) -> SmtError {
    SmtError::MalformedModel(format!("{msg}: {sx}"))
}

fn parse_value(sx: &SExpr) -> Result<Value, SmtError> {
    match sx {
        SExpr::Atom(a) => parse_literal(a).map(Value::Exact).ok_or_else(|| malformed(sx, "bad numeral")),
        SExpr::List(xs) => match sx.head() {
            Some("-") if xs.len() == 2 => Ok(match parse_value(&xs[1])? {
                Value::Exact(r) => Value::Exact(-r),
                Value::Approx(r) => Value::Approx(-r),
            }),
            Some("/") if xs.len() == 3 => match (parse_value(&xs[1])?, parse_value(&xs[2])?) {
                (Value::Exact(a), Value::Exact(b)) if !b.is_zero() => Ok(Value::Exact(a / b)),
                _ => Err(malformed(sx, "bad quotient")),
            },
            Some("root-obj") if xs.len() == 3 => {
                let poly = parse_univariate(&xs[1])?;
                let index: usize = xs[2].atom().and_then(|a| a.parse().ok()).ok_or_else(|| malformed(sx, "bad root index"))?;
                let r = real_root(&poly, index).ok_or_else(|| malformed(sx, "root index out of range"))?;
                Ok(Value::Approx(r))
            }
            _ => Err(malformed(sx, "unsupported value")),
        },
    }
}

/// Integer or decimal literal, converted exactly.
fn parse_literal(a: &str) -> Option<Rational> {
    if a.is_empty() || !a.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    a.parse().ok()
}

/// Dense coefficients, lowest degree first.
type UPoly = Vec<Rational>;

fn parse_univariate(sx: &SExpr) -> Result<UPoly, SmtError> {
    let mut p = match sx {
        SExpr::Atom(a) => match parse_literal(a) {
            Some(c) => vec![c],
            None => vec![Rational::zero(), Rational::one()],
        },
        SExpr::List(xs) => {
            let args = xs[1..].iter().map(parse_univariate).collect::<Result<Vec<_>, _>>()?;
            match sx.head() {
                Some("+") => args.into_iter().fold(vec![], |a, b| padd(&a, &b)),
                Some("-") if args.len() == 1 => pneg(&args[0]),
                Some("-") => {
                    let mut it = args.into_iter();
                    let first = it.next().unwrap_or_default();
                    it.fold(first, |a, b| padd(&a, &pneg(&b)))
                }
                Some("*") => args.into_iter().fold(vec![Rational::one()], |a, b| pmul(&a, &b)),
                Some("^") if xs.len() == 3 => {
                    let n: u32 = xs[2].atom().and_then(|a| a.parse().ok()).ok_or_else(|| malformed(sx, "bad exponent"))?;
                    (0..n).fold(vec![Rational::one()], |a, _| pmul(&a, &args[0]))
                }
                Some("/") if args.len() == 2 && args[1].len() == 1 && !args[1][0].is_zero() => {
                    let d = args[1][0].clone();
                    args[0].iter().map(|c| c / &d).collect()
                }
                _ => return Err(malformed(sx, "unsupported polynomial")),
            }
        }
    };
    trim(&mut p);
    Ok(p)
}

fn trim(p: &mut UPoly) {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
}

fn padd(a: &UPoly, b: &UPoly) -> UPoly {
    let mut out: UPoly = (0..a.len().max(b.len()))
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

fn pneg(a: &UPoly) -> UPoly {
    a.iter().map(|c| -c).collect()
}

fn pmul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    trim(&mut out);
    out
}

fn deriv(p: &UPoly) -> UPoly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from(i as i64)).collect()
}

fn prem(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r = a.clone();
    let lead = b.last().expect("division by zero polynomial");
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let q = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &q * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn eval(p: &UPoly, x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn sturm(p: &UPoly) -> Vec<UPoly> {
    let mut seq = vec![p.clone(), deriv(p)];
    while let Some(last) = seq.last().filter(|q| !q.is_empty()) {
        let r = pneg(&prem(&seq[seq.len() - 2], last));
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    seq.retain(|q| !q.is_empty());
    seq
}

fn sign_changes(seq: &[UPoly], x: &Rational) -> usize {
    let signs: Vec<i32> = seq.iter().map(|q| eval(q, x).signum()).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `index`-th real root (1-based, ascending) of `p`, rounded to the simplest
/// rational within 2⁻¹²⁰ of it.
pub fn real_root(p: &UPoly, index: usize) -> Option<Rational> {
    if p.len() < 2 || index == 0 {
        return None;
    }
    let lead = p.last()?;
    let cauchy = p[..p.len() - 1].iter().map(|c| (c / lead).abs()).fold(Rational::zero(), Rational::max) + Rational::one();
    let seq = sturm(p);
    // Roots in (a, b] = V(a) - V(b).
    let below = |x: &Rational| sign_changes(&seq, &(-&cauchy)) - sign_changes(&seq, x);
    if below(&cauchy) < index {
        return None;
    }
    let (mut lo, mut hi) = (-&cauchy, cauchy.clone());
    let tol = Rational::new(1, BigInt::from(1) << 120);
    while &hi - &lo > tol {
        let mid = lo.midpoint(&hi);
        if eval(p, &mid).is_zero() && below(&mid) == index {
            return Some(mid);
        }
        if below(&mid) >= index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(simplest_between(&lo, &hi))
}

/// Rational with the smallest denominator in `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = -Rational::from_integer(crate::rational::ceil(&-lo));
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if next <= *hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip().unwrap(), &(lo - &fl).recip().unwrap());
    fl + inner.recip().unwrap()
}

#[cfg(test)]
mod tests {
    use super::super::sexpr::parse_all;
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn model(text: &str) -> Model {
        parse_model(&parse_all(text).unwrap()[0]).unwrap()
    }

    #[test]
    fn literal_forms() {
        let m = model("(model (define-fun a () Real (- (/ 3 2))) (define-fun b () Real 1.25) (define-fun c () Real 7))");
        assert_eq!(m.values["a"], q("-3/2"));
        assert_eq!(m.values["b"], q("5/4"));
        assert_eq!(m.values["c"], q("7"));
        assert!(m.is_exact());
    }

    #[test]
    fn bare_define_fun_list() {
        let m = model("((define-fun x () Real (/ 1.0 2.0)))");
        assert_eq!(m.values["x"], q("1/2"));
    }

    #[test]
    fn algebraic_root() {
        let m = model("(model (define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 1)))");
        let r = &m.values["x"];
        assert!(m.approximated.contains("x"));
        assert!((r.to_f64() + std::f64::consts::SQRT_2).abs() < 1e-15);
        let m = model("(model (define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 2)))");
        assert!((m.values["x"].to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn root_of_cubic_with_scaling() {
        // 2x^3 - x - 1 has the single real root 1.
        let p = vec![q("-1"), q("-1"), q("0"), q("2")];
        assert_eq!(real_root(&p, 1), Some(q("1")));
        assert_eq!(real_root(&p, 2), None);
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&q("3/10"), &q("4/10")), q("1/3"));
        assert_eq!(simplest_between(&q("-4/10"), &q("-3/10")), q("-1/3"));
        assert_eq!(simplest_between(&q("-1"), &q("1")), q("0"));
        assert_eq!(simplest_between(&q("5/2"), &q("5/2")), q("5/2"));
        assert_eq!(simplest_between(&q("21/10"), &q("39/10")), q("3"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_model(&parse_all("(model (define-fun x () Real foo))").unwrap()[0]).is_err());
        assert!(parse_model(&parse_all("(model (x 1))").unwrap()[0]).is_err());
    }
}
