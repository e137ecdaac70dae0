//! Quantifier-free formulas over real arithmetic atoms.

use std::fmt;

use crate::expr::{eval_rational, Expr, ExprError, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
        }
    }

    /// Relational operators accepted in region guards.
    pub fn parse_guard(s: &str) -> Option<CmpOp> {
        match s {
            "<" => Some(CmpOp::Lt),
            "<=" => Some(CmpOp::Le),
            ">" => Some(CmpOp::Gt),
            ">=" => Some(CmpOp::Ge),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Cmp(Expr, CmpOp, Expr),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn cmp(lhs: Expr, op: CmpOp, rhs: Expr) -> Formula {
        Formula::Cmp(lhs, op, rhs)
    }

    /// `e op 0`
    pub fn cmp_zero(e: Expr, op: CmpOp) -> Formula {
        Formula::Cmp(e, op, Expr::zero())
    }

    pub fn or(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::Or(fs)
        }
    }

    pub fn and(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::And(fs)
        }
    }

    /// Exact truth value at a point.
    pub fn holds(&self, pt: &Point) -> Result<bool, ExprError> {
        Ok(match self {
            Formula::Cmp(a, op, b) => {
                let (a, b) = (eval_rational(a, pt)?, eval_rational(b, pt)?);
                op.holds(a.cmp(&b))
            }
            Formula::And(fs) => {
                for f in fs {
                    if !f.holds(pt)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.holds(pt)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(f) => !f.holds(pt)?,
        })
    }

    pub fn exprs(&self) -> Vec<&Expr> {
        match self {
            Formula::Cmp(a, _, b) => vec![a, b],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().flat_map(|f| f.exprs()).collect(),
            Formula::Not(f) => f.exprs(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.symbol()),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(self, Formula::And(_)) { " and " } else { " or " };
                f.write_str("(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "not {g}"),
        }
    }
}
