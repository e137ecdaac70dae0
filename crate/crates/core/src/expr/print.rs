//! Text rendering in the same syntax the parser accepts.
//!
//! Printing never reorders or rewrites the tree, so for any tree produced
//! by the parser `parse(print(e)) == e`.

use std::fmt;

use super::Expr;
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Term,
    Factor,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, Prec::Sum)
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, r: &Rational, ctx: Prec) -> fmt::Result {
    let needs_parens = (r.is_negative() && ctx > Prec::Sum) || (!r.is_integer() && ctx == Prec::Factor);
    if needs_parens {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: Prec) -> fmt::Result {
    match e {
        Expr::Var(n) | Expr::Param(n) => f.write_str(n),
        Expr::Eps(id) => write!(f, "eps_{id}"),
        Expr::Const(r) => write_const(f, r, ctx),
        Expr::Sum(cs) => {
            if ctx > Prec::Sum {
                f.write_str("(")?;
            }
            for (i, c) in cs.iter().enumerate() {
                match c {
                    Expr::Neg(inner) => {
                        f.write_str(if i == 0 { "-" } else { " - " })?;
                        write_expr(f, inner, Prec::Term)?;
                    }
                    _ => {
                        if i > 0 {
                            f.write_str(" + ")?;
                        }
                        write_expr(f, c, Prec::Term)?;
                    }
                }
            }
            if ctx > Prec::Sum {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Product(cs) => {
            if ctx > Prec::Term {
                f.write_str("(")?;
            }
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                match c {
                    // Nested products and negations keep their own parentheses
                    // so the tree shape survives a round trip.
                    Expr::Product(_) | Expr::Neg(_) => {
                        f.write_str("(")?;
                        write_expr(f, c, Prec::Sum)?;
                        f.write_str(")")?;
                    }
                    Expr::Const(r) if r.is_negative() => write!(f, "({r})")?,
                    _ => write_expr(f, c, Prec::Term)?,
                }
            }
            if ctx > Prec::Term {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Pow(b, n) => {
            match b.as_ref() {
                Expr::Var(_) | Expr::Param(_) | Expr::Eps(_) => write_expr(f, b, Prec::Factor)?,
                Expr::Const(r) if r.is_integer() && !r.is_negative() => write!(f, "{r}")?,
                Expr::Abs(_) | Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_) => write_expr(f, b, Prec::Factor)?,
                _ => {
                    f.write_str("(")?;
                    write_expr(f, b, Prec::Sum)?;
                    f.write_str(")")?;
                }
            }
            write!(f, "^{n}")
        }
        Expr::Neg(c) => {
            if ctx > Prec::Sum {
                f.write_str("(")?;
            }
            f.write_str("-")?;
            write_expr(f, c, Prec::Term)?;
            if ctx > Prec::Sum {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Abs(c) => call(f, "abs", c),
        Expr::Exp(c) => call(f, "exp", c),
        Expr::Sin(c) => call(f, "sin", c),
        Expr::Arctan(c) => call(f, "arctan", c),
    }
}

fn call(f: &mut fmt::Formatter<'_>, name: &str, arg: &Expr) -> fmt::Result {
    write!(f, "{name}(")?;
    write_expr(f, arg, Prec::Sum)?;
    f.write_str(")")
}
