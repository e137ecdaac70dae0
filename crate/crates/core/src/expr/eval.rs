use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Expr, ExprError};
use crate::rational::Rational;

/// Exact assignment of rationals to names (variables and parameters) and to
/// ε-variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub values: BTreeMap<String, Rational>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eps: BTreeMap<u32, Rational>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Rational)>) -> Self {
        Point { values: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(), eps: BTreeMap::new() }
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn eps(&self, id: u32) -> Option<&Rational> {
        self.eps.get(&id)
    }

    pub fn set(&mut self, name: impl Into<String>, v: Rational) {
        self.values.insert(name.into(), v);
    }

    pub fn set_eps(&mut self, id: u32, v: Rational) {
        self.eps.insert(id, v);
    }

    /// Union; entries of `other` win on conflicts.
    pub fn merged(&self, other: &Point) -> Point {
        let mut out = self.clone();
        out.values.extend(other.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.eps.extend(other.eps.iter().map(|(k, v)| (*k, v.clone())));
        out
    }
}

/// Float assignment, used by sampling oracles only.
#[derive(Clone, Debug, Default)]
pub struct FloatPoint {
    pub values: BTreeMap<String, f64>,
    pub eps: BTreeMap<u32, f64>,
}

impl FloatPoint {
    pub fn set(&mut self, name: impl Into<String>, v: f64) {
        self.values.insert(name.into(), v);
    }
}

impl From<&Point> for FloatPoint {
    fn from(p: &Point) -> Self {
        FloatPoint {
            values: p.values.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
            eps: p.eps.iter().map(|(k, v)| (*k, v.to_f64())).collect(),
        }
    }
}

/// Exact evaluation. `abs` and ε-variables are allowed; `exp`, `sin` and
/// `arctan` are not.
pub fn eval_rational(e: &Expr, pt: &Point) -> Result<Rational, ExprError> {
    Ok(match e {
        Expr::Var(n) | Expr::Param(n) => pt.get(n).cloned().ok_or_else(|| ExprError::Unbound(n.clone()))?,
        Expr::Eps(id) => pt.eps(*id).cloned().ok_or_else(|| ExprError::Unbound(format!("eps_{id}")))?,
        Expr::Const(r) => r.clone(),
        Expr::Sum(cs) => {
            let mut acc = Rational::zero();
            for c in cs {
                acc = acc + eval_rational(c, pt)?;
            }
            acc
        }
        Expr::Product(cs) => {
            let mut acc = Rational::one();
            for c in cs {
                acc = acc * eval_rational(c, pt)?;
            }
            acc
        }
        Expr::Pow(b, n) => eval_rational(b, pt)?.pow(*n),
        Expr::Neg(c) => -eval_rational(c, pt)?,
        Expr::Abs(c) => eval_rational(c, pt)?.abs(),
        Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_) => return Err(ExprError::Transcendental(e.to_string())),
    })
}

/// IEEE double evaluation with the true transcendental functions.
/// Approximate by nature; used only by sampling checks.
pub fn eval_float(e: &Expr, pt: &FloatPoint) -> Result<f64, ExprError> {
    Ok(match e {
        Expr::Var(n) | Expr::Param(n) => *pt.values.get(n).ok_or_else(|| ExprError::Unbound(n.clone()))?,
        Expr::Eps(id) => *pt.eps.get(id).ok_or_else(|| ExprError::Unbound(format!("eps_{id}")))?,
        Expr::Const(r) => r.to_f64(),
        Expr::Sum(cs) => {
            let mut acc = 0.0;
            for c in cs {
                acc += eval_float(c, pt)?;
            }
            acc
        }
        Expr::Product(cs) => {
            let mut acc = 1.0;
            for c in cs {
                acc *= eval_float(c, pt)?;
            }
            acc
        }
        Expr::Pow(b, n) => eval_float(b, pt)?.powi(*n as i32),
        Expr::Neg(c) => -eval_float(c, pt)?,
        Expr::Abs(c) => eval_float(c, pt)?.abs(),
        Expr::Exp(c) => eval_float(c, pt)?.exp(),
        Expr::Sin(c) => eval_float(c, pt)?.sin(),
        Expr::Arctan(c) => eval_float(c, pt)?.atan(),
    })
}
