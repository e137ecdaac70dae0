//! Per-region proof obligations and the formulas built from them.

use std::collections::BTreeMap;

use crate::approx::{relax, EpsBound};
use crate::expr::{lie_derivative, Expr, Point};
use crate::formula::{CmpOp, Formula};
use crate::problem::{origin_exclusion, ParamValues, ProblemFile, TimeKind};

use super::{CegisError, Counterexample};

/// Everything the verifier needs for one region, with parameters still
/// symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub region: usize,
    pub guard: Vec<Formula>,
    /// Deficit before relaxation: `∇V·f` or `V(f(x)) - V(x)`.
    pub raw_deficit: Expr,
    /// Deficit with transcendentals replaced by series plus ε.
    pub deficit: Expr,
    pub eps_bounds: Vec<EpsBound>,
}

/// The stability deficit of `region`, relaxed with the problem's orders.
pub fn stability_deficit(problem: &ProblemFile, region: usize) -> Result<Obligation, CegisError> {
    let r = &problem.system.regions[region];
    let v = problem.template.candidate();
    let raw_deficit = match problem.system.time {
        TimeKind::Continuous => lie_derivative(&v, &problem.system.state, &r.dynamics)?,
        TimeKind::Discrete => {
            let next: BTreeMap<String, Expr> = problem.system.state.iter().cloned().zip(r.dynamics.iter().cloned()).collect();
            Expr::sub(v.substitute(&next), v).simplify()
        }
    };
    let relaxed = relax(&raw_deficit, &problem.approx, &problem.system.domain)?;
    Ok(Obligation {
        region,
        guard: r.guard_formulas(),
        raw_deficit,
        deficit: relaxed.rewritten,
        eps_bounds: relaxed.eps_bounds,
    })
}

pub(crate) fn bind_params(e: &Expr, params: &ParamValues) -> Expr {
    let bindings = params.iter().map(|(k, v)| (k.clone(), Expr::Const(v.clone()))).collect();
    e.substitute(&bindings).simplify()
}

fn weak_to_strict(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Le => CmpOp::Lt,
        CmpOp::Ge => CmpOp::Gt,
        other => other,
    }
}

fn strictify(f: Formula) -> Formula {
    match f {
        Formula::Cmp(a, op, b) => Formula::Cmp(a, weak_to_strict(op), b),
        Formula::And(fs) => Formula::And(fs.into_iter().map(strictify).collect()),
        Formula::Or(fs) => Formula::Or(fs.into_iter().map(strictify).collect()),
        Formula::Not(g) => Formula::Not(g),
    }
}

/// The candidate fails at a point when `V <= 0` or the deficit has the
/// wrong sign.
pub(crate) fn violation(v: &Expr, deficit: &Expr, asymptotic: bool) -> Formula {
    let bad_deficit = if asymptotic { CmpOp::Ge } else { CmpOp::Gt };
    Formula::Or(vec![Formula::cmp_zero(v.clone(), CmpOp::Le), Formula::cmp_zero(deficit.clone(), bad_deficit)])
}

/// What the learner asserts for one counterexample.
pub(crate) fn requirement(v: &Expr, deficit: &Expr, asymptotic: bool) -> [Formula; 2] {
    let good_deficit = if asymptotic { CmpOp::Lt } else { CmpOp::Le };
    [Formula::cmp_zero(v.clone(), CmpOp::Gt), Formula::cmp_zero(deficit.clone(), good_deficit)]
}

fn eps_constraints(b: &EpsBound) -> [Formula; 2] {
    [
        Formula::cmp(Expr::neg(b.bound.clone()).simplify(), CmpOp::Le, b.eps()),
        Formula::cmp(b.eps(), CmpOp::Le, b.bound.clone()),
    ]
}

/// Verifier assertions for one region and concrete `V`, `deficit`.
///
/// With `open` every weak inequality becomes strict. The solution set is
/// then open, so any algebraic model can be rounded to a nearby rational
/// that still satisfies it.
pub(crate) fn verifier_assertions(
    problem: &ProblemFile,
    ob: &Obligation,
    v: &Expr,
    deficit: &Expr,
    asymptotic: bool,
    open: bool,
) -> Result<Vec<Formula>, CegisError> {
    let mut out = problem.system.domain.constraints();
    out.extend(ob.guard.iter().cloned());
    out.push(origin_exclusion(&problem.system.state)?);
    for b in &ob.eps_bounds {
        out.extend(eps_constraints(b));
    }
    out.push(violation(v, deficit, asymptotic));
    if open {
        out = out.into_iter().map(strictify).collect();
    }
    Ok(out)
}

/// Exact re-check of a counterexample against the concrete candidate.
pub(crate) fn validate_counterexample(
    problem: &ProblemFile,
    ob: &Obligation,
    v: &Expr,
    deficit: &Expr,
    cex: &Counterexample,
    asymptotic: bool,
) -> Result<(), String> {
    let pt = cex.as_point();
    let check = |f: &Formula, what: &str| match f.holds(&pt) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{what} `{f}` fails at {cex}")),
        Err(e) => Err(format!("{what} `{f}` cannot be evaluated at {cex}: {e}")),
    };
    for f in problem.system.domain.constraints() {
        check(&f, "domain bound")?;
    }
    for f in &ob.guard {
        check(f, "region guard")?;
    }
    check(&origin_exclusion(&problem.system.state).map_err(|e| e.to_string())?, "origin exclusion")?;
    for b in &ob.eps_bounds {
        for f in eps_constraints(b) {
            check(&f, "error bound")?;
        }
    }
    check(&violation(v, deficit, asymptotic), "violation")
}

/// Learner constraints for one counterexample, as expressions in the
/// parameters.
pub(crate) fn learner_constraints(
    problem: &ProblemFile,
    ob: &Obligation,
    cex: &Counterexample,
    asymptotic: bool,
) -> [Formula; 2] {
    let pt = cex.as_point();
    let v_at = problem.template.candidate().instantiate(&pt);
    let d_at = ob.deficit.instantiate(&pt);
    requirement(&v_at, &d_at, asymptotic)
}

/// Exact check that `params` meets every learner constraint.
pub(crate) fn params_satisfy(constraints: &[Formula], params: &ParamValues) -> Result<bool, CegisError> {
    let pt = Point { values: params.clone(), eps: BTreeMap::new() };
    for f in constraints {
        if !f.holds(&pt)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact value of `e` at a counterexample with bound parameters.
#[cfg(test)]
fn value_at(e: &Expr, cex: &Counterexample, params: &ParamValues) -> Result<crate::rational::Rational, CegisError> {
    let mut pt = cex.as_point();
    for (k, v) in params {
        pt.set(k.clone(), v.clone());
    }
    Ok(crate::expr::eval_rational(e, &pt)?)
}
