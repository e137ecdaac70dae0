//! SMT-LIB2 emission and an external-solver driver.

mod model;
mod sexpr;
mod solver;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::expr::Expr;
use crate::formula::{CmpOp, Formula};
use crate::rational::Rational;

pub use model::{parse_model, real_root, simplest_between, Model};
pub use sexpr::{parse_all, SExpr};
pub use solver::{parse_output, run_solver, SolverCommand, SolverResult, DEFAULT_SOLVER, SOLVER_ENV};

/// Logic used for every query.
pub const LOGIC: &str = "QF_NRA";

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("transcendental term `{0}` must be relaxed before it reaches the solver")]
    Transcendental(String),
    #[error("solver command is empty")]
    EmptyCommand,
    #[error("cannot start solver `{cmd}`: {source}")]
    Spawn { cmd: String, source: std::io::Error },
    #[error("solver I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver exited with {status} without a verdict; stderr: {stderr}; stdout: {stdout}")]
    Failed { status: String, stdout: String, stderr: String },
    #[error("malformed model: {0}")]
    MalformedModel(String),
}

/// A complete solver script. The text form is a pure function of the
/// inputs, so scripts can be compared byte-for-byte.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtScript {
    pub logic: String,
    /// Declared real constants, sorted.
    pub decls: Vec<String>,
    pub assertions: Vec<String>,
}

impl SmtScript {
    pub fn text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SmtScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(set-option :produce-models true)")?;
        writeln!(f, "(set-logic {})", self.logic)?;
        for d in &self.decls {
            writeln!(f, "(declare-const {d} Real)")?;
        }
        for a in &self.assertions {
            writeln!(f, "(assert {a})")?;
        }
        writeln!(f, "(check-sat)")?;
        writeln!(f, "(get-model)")
    }
}

/// SMT name of an expression leaf.
pub fn symbol_name(e: &Expr) -> Option<String> {
    match e {
        Expr::Var(v) | Expr::Param(v) => Some(v.clone()),
        Expr::Eps(id) => Some(format!("eps_{id}")),
        _ => None,
    }
}

/// Build a script asserting every formula. Every symbol that occurs is
/// declared as a real constant.
pub fn emit(assertions: &[Formula], logic: &str) -> Result<SmtScript, SmtError> {
    let mut decls = BTreeSet::new();
    let mut rendered = Vec::with_capacity(assertions.len());
    for a in assertions {
        for e in a.exprs() {
            collect_symbols(e, &mut decls);
        }
        let mut s = String::new();
        render_formula(a, &mut s)?;
        rendered.push(s);
    }
    Ok(SmtScript { logic: logic.to_string(), decls: decls.into_iter().collect(), assertions: rendered })
}

fn collect_symbols(e: &Expr, out: &mut BTreeSet<String>) {
    if let Some(name) = symbol_name(e) {
        out.insert(name);
    }
    for c in e.children() {
        collect_symbols(c, out);
    }
}

pub fn render_rational(r: &Rational, out: &mut String) {
    let abs = r.abs();
    let body = if abs.is_integer() { abs.numer().to_string() } else { format!("(/ {} {})", abs.numer(), abs.denom()) };
    if r.is_negative() {
        let _ = write!(out, "(- {body})");
    } else {
        out.push_str(&body);
    }
}

fn render_nary(op: &str, cs: &[Expr], out: &mut String) -> Result<(), SmtError> {
    let _ = write!(out, "({op}");
    for c in cs {
        out.push(' ');
        render_expr(c, out)?;
    }
    out.push(')');
    Ok(())
}

pub fn render_expr(e: &Expr, out: &mut String) -> Result<(), SmtError> {
    match e {
        Expr::Var(_) | Expr::Param(_) | Expr::Eps(_) => out.push_str(&symbol_name(e).unwrap()),
        Expr::Const(r) => render_rational(r, out),
        Expr::Sum(cs) => render_nary("+", cs, out)?,
        Expr::Product(cs) => render_nary("*", cs, out)?,
        Expr::Pow(b, n) => match n {
            0 => out.push('1'),
            1 => render_expr(b, out)?,
            _ => render_nary("*", &vec![(**b).clone(); *n as usize], out)?,
        },
        Expr::Neg(c) => render_nary("-", std::slice::from_ref(c), out)?,
        Expr::Abs(c) => {
            let mut inner = String::new();
            render_expr(c, &mut inner)?;
            let _ = write!(out, "(ite (>= {inner} 0) {inner} (- {inner}))");
        }
        Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_) => return Err(SmtError::Transcendental(e.to_string())),
    }
    Ok(())
}

pub fn render_formula(f: &Formula, out: &mut String) -> Result<(), SmtError> {
    match f {
        Formula::Cmp(a, op, b) => {
            let head = match op {
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
                CmpOp::Eq | CmpOp::Ne => "=",
            };
            if *op == CmpOp::Ne {
                out.push_str("(not ");
            }
            let _ = write!(out, "({head} ");
            render_expr(a, out)?;
            out.push(' ');
            render_expr(b, out)?;
            out.push(')');
            if *op == CmpOp::Ne {
                out.push(')');
            }
        }
        Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" });
        }
        Formula::And(fs) | Formula::Or(fs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in fs {
                out.push(' ');
                render_formula(g, out)?;
            }
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            render_formula(g, out)?;
            out.push(')');
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn render(s: &str) -> String {
        let mut out = String::new();
        render_expr(&e(s), &mut out).unwrap();
        out
    }

    #[test]
    fn literals() {
        assert_eq!(render("3/2"), "(/ 3 2)");
        assert_eq!(render("-(3/2)"), "(- (/ 3 2))");
        assert_eq!(render("-7"), "(- 7)");
        assert_eq!(render("0"), "0");
    }

    #[test]
    fn abs_is_ite() {
        assert_eq!(render("abs(x)"), "(ite (>= x 0) x (- x))");
    }

    #[test]
    fn powers_expand() {
        assert_eq!(render("x^3"), "(* x x x)");
        assert_eq!(render("2*x^2 + y"), "(+ (* 2 (* x x)) y)");
    }

    #[test]
    fn transcendental_rejected() {
        let f = Formula::cmp_zero(e("exp(x)"), CmpOp::Gt);
        assert!(matches!(emit(&[f], LOGIC), Err(SmtError::Transcendental(_))));
    }

    #[test]
    fn script_shape() {
        let f = vec![
            Formula::cmp(e("x^2"), CmpOp::Le, Expr::one()),
            Formula::cmp(e("x"), CmpOp::Eq, Expr::Const(Rational::new(1, 2))),
            Formula::or(vec![Formula::cmp_zero(e("y"), CmpOp::Le), Formula::cmp_zero(Expr::Eps(0), CmpOp::Ne)]),
        ];
        let s = emit(&f, LOGIC).unwrap();
        assert_eq!(
            s.text(),
            "(set-option :produce-models true)\n(set-logic QF_NRA)\n(declare-const eps_0 Real)\n(declare-const x Real)\n\
             (declare-const y Real)\n(assert (<= (* x x) 1))\n(assert (= x (/ 1 2)))\n\
             (assert (or (<= y 0) (not (= eps_0 0))))\n(check-sat)\n(get-model)\n"
        );
        assert_eq!(emit(&f, LOGIC).unwrap().text(), s.text());
    }
}
