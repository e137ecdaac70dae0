//! Symbolic expressions over exact rationals.
//!
//! An [`Expr`] is an immutable tree. Construct nodes through the smart
//! constructors ([`Expr::sum`], [`Expr::product`], ...) which keep the
//! structural invariants: sums and products always have at least two
//! children, exponents are non-negative integers.

mod diff;
mod eval;
mod parse;
mod poly;
mod print;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rational::Rational;

pub use diff::{differentiate, lie_derivative};
pub use eval::{eval_float, eval_rational, FloatPoint, Point};
pub use parse::{parse_expr, parse_expr_with_params, ParseError};

/// Expression tree node.
///
/// The derived ordering is only used to give canonical forms a stable
/// term order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Param(String),
    Var(String),
    Eps(u32),
    Const(Rational),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Arctan(Box<Expr>),
}

/// Transcendental function kinds that must be relaxed before any solver query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FnKind {
    Exp,
    Sin,
    Arctan,
}

impl FnKind {
    pub const ALL: [FnKind; 3] = [FnKind::Exp, FnKind::Sin, FnKind::Arctan];

    pub fn name(self) -> &'static str {
        match self {
            FnKind::Exp => "exp",
            FnKind::Sin => "sin",
            FnKind::Arctan => "arctan",
        }
    }

    pub fn apply(self, arg: Expr) -> Expr {
        match self {
            FnKind::Exp => Expr::Exp(Box::new(arg)),
            FnKind::Sin => Expr::Sin(Box::new(arg)),
            FnKind::Arctan => Expr::Arctan(Box::new(arg)),
        }
    }

    pub fn eval_f64(self, x: f64) -> f64 {
        match self {
            FnKind::Exp => x.exp(),
            FnKind::Sin => x.sin(),
            FnKind::Arctan => x.atan(),
        }
    }
}

impl std::fmt::Display for FnKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for FnKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Expressions serialize as their canonical text.
impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown function kind `{0}`")]
pub struct UnknownFnKind(pub String);

impl std::str::FromStr for FnKind {
    type Err = UnknownFnKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" => Ok(FnKind::Exp),
            "sin" => Ok(FnKind::Sin),
            "arctan" => Ok(FnKind::Arctan),
            other => Err(UnknownFnKind(other.to_string())),
        }
    }
}

/// Errors raised by symbolic operations (differentiation, evaluation).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("non-polynomial node `{0}` cannot be differentiated")]
    NonPolynomial(String),
    #[error("dimension mismatch: {vars} state variables but {fields} vector-field components")]
    DimensionMismatch { vars: usize, fields: usize },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("transcendental node `{0}` cannot be evaluated exactly")]
    Transcendental(String),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn constant(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Sum node; zero children give `0`, one child is returned as-is.
    pub fn sum(mut children: Vec<Expr>) -> Expr {
        match children.len() {
            0 => Expr::zero(),
            1 => children.pop().unwrap(),
            _ => Expr::Sum(children),
        }
    }

    /// Product node; zero children give `1`, one child is returned as-is.
    pub fn product(mut children: Vec<Expr>) -> Expr {
        match children.len() {
            0 => Expr::one(),
            1 => children.pop().unwrap(),
            _ => Expr::Product(children),
        }
    }

    pub fn pow(base: Expr, exp: u32) -> Expr {
        Expr::Pow(Box::new(base), exp)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::Abs(Box::new(e))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(r) if r.is_zero())
    }

    /// Direct children, in order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Param(_) | Expr::Var(_) | Expr::Eps(_) | Expr::Const(_) => vec![],
            Expr::Sum(cs) | Expr::Product(cs) => cs.iter().collect(),
            Expr::Pow(b, _) => vec![b],
            Expr::Neg(c) | Expr::Abs(c) | Expr::Exp(c) | Expr::Sin(c) | Expr::Arctan(c) => vec![c],
        }
    }

    /// Pre-order traversal predicate.
    pub fn any(&self, pred: &mut impl FnMut(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_transcendental(&self) -> bool {
        self.any(&mut |e| matches!(e, Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_)))
    }

    pub fn has_abs(&self) -> bool {
        self.any(&mut |e| matches!(e, Expr::Abs(_)))
    }

    /// True iff no Abs/Exp/Sin/Arctan node occurs.
    pub fn is_polynomial(&self) -> bool {
        !self.any(&mut |e| {
            matches!(e, Expr::Abs(_) | Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_))
        })
    }

    fn collect_names(&self, vars: &mut BTreeSet<String>, params: &mut BTreeSet<String>, eps: &mut BTreeSet<u32>) {
        match self {
            Expr::Var(v) => {
                vars.insert(v.clone());
            }
            Expr::Param(p) => {
                params.insert(p.clone());
            }
            Expr::Eps(id) => {
                eps.insert(*id);
            }
            _ => self.children().into_iter().for_each(|c| c.collect_names(vars, params, eps)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let (mut v, mut p, mut e) = Default::default();
        self.collect_names(&mut v, &mut p, &mut e);
        v
    }

    pub fn free_params(&self) -> BTreeSet<String> {
        let (mut v, mut p, mut e) = Default::default();
        self.collect_names(&mut v, &mut p, &mut e);
        p
    }

    pub fn eps_ids(&self) -> BTreeSet<u32> {
        let (mut v, mut p, mut e) = Default::default();
        self.collect_names(&mut v, &mut p, &mut e);
        e
    }

    /// Rebuild the tree bottom-up, letting `f` replace leaves.
    pub fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        let unary = |c: &Expr| Box::new(c.map_leaves(f));
        match self {
            Expr::Param(_) | Expr::Var(_) | Expr::Eps(_) | Expr::Const(_) => {
                f(self).unwrap_or_else(|| self.clone())
            }
            Expr::Sum(cs) => Expr::Sum(cs.iter().map(|c| c.map_leaves(f)).collect()),
            Expr::Product(cs) => Expr::Product(cs.iter().map(|c| c.map_leaves(f)).collect()),
            Expr::Pow(b, n) => Expr::Pow(unary(b), *n),
            Expr::Neg(c) => Expr::Neg(unary(c)),
            Expr::Abs(c) => Expr::Abs(unary(c)),
            Expr::Exp(c) => Expr::Exp(unary(c)),
            Expr::Sin(c) => Expr::Sin(unary(c)),
            Expr::Arctan(c) => Expr::Arctan(unary(c)),
        }
    }

    /// Simultaneous substitution of variables and parameters by name.
    /// Names without a binding are left unchanged. No simplification is
    /// applied.
    pub fn substitute(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        self.map_leaves(&|leaf| match leaf {
            Expr::Var(n) | Expr::Param(n) => bindings.get(n).cloned(),
            _ => None,
        })
    }

    /// Substitute ε-variables by id.
    pub fn substitute_eps(&self, bindings: &BTreeMap<u32, Expr>) -> Expr {
        self.map_leaves(&|leaf| match leaf {
            Expr::Eps(id) => bindings.get(id).cloned(),
            _ => None,
        })
    }

    /// Replace every symbol bound in `pt` by its value, then simplify.
    pub fn instantiate(&self, pt: &Point) -> Expr {
        self.map_leaves(&|leaf| match leaf {
            Expr::Var(n) | Expr::Param(n) => pt.get(n).cloned().map(Expr::Const),
            Expr::Eps(id) => pt.eps(*id).cloned().map(Expr::Const),
            _ => None,
        })
        .simplify()
    }

    /// Canonical form: polynomial parts are expanded into monomials ordered
    /// lexicographically by symbol then degree, constants are folded and
    /// zero terms dropped. Non-polynomial nodes are kept as opaque factors
    /// with simplified arguments.
    pub fn simplify(&self) -> Expr {
        poly::Poly::from_expr(self).to_expr()
    }
}
