//! Problem definitions and the JSON problem-file reader.

mod file;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::ApproxOrders;
use crate::cegis::CegisConfig;
use crate::expr::{eval_rational, Expr, ExprError, ParseError, Point};
use crate::formula::{CmpOp, Formula};
use crate::rational::Rational;

pub use file::{dump_problem, load_problem, parse_problem, RawProblem};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{context}: undeclared symbol `{symbol}`")]
    UndeclaredSymbol { context: String, symbol: String },
    #[error("template basis function {index} (`{basis}`) is {value} at the origin, but must vanish there")]
    TemplateNonzeroAtOrigin { index: usize, basis: String, value: Rational },
    #[error("template basis function {index} (`{basis}`) uses abs, which is only allowed for discrete-time systems")]
    AbsInContinuousTemplate { index: usize, basis: String },
    #[error("region {region}: {found} dynamics components for {expected} state variables")]
    DimensionMismatch { region: usize, expected: usize, found: usize },
    #[error("origin exclusion needs at least one state variable")]
    EmptyState,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Continuous,
    Discrete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    pub strict: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

/// Axis-aligned domain box; variables without an entry are unbounded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Domain {
    pub intervals: BTreeMap<String, Interval>,
}

impl Domain {
    /// `[lo, hi]` closure of a variable's interval, when bounded on both sides.
    pub fn closure(&self, var: &str) -> Option<(Rational, Rational)> {
        let iv = self.intervals.get(var)?;
        Some((iv.lower.as_ref()?.value.clone(), iv.upper.as_ref()?.value.clone()))
    }

    /// Bound constraints with their strictness.
    pub fn constraints(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        for (v, iv) in &self.intervals {
            if let Some(b) = &iv.lower {
                let op = if b.strict { CmpOp::Lt } else { CmpOp::Le };
                out.push(Formula::cmp(Expr::Const(b.value.clone()), op, Expr::var(v)));
            }
            if let Some(b) = &iv.upper {
                let op = if b.strict { CmpOp::Lt } else { CmpOp::Le };
                out.push(Formula::cmp(Expr::var(v), op, Expr::Const(b.value.clone())));
            }
        }
        out
    }

    /// Membership in the closure of the box.
    pub fn closure_contains(&self, pt: &Point) -> bool {
        self.intervals.iter().all(|(v, iv)| {
            let Some(x) = pt.get(v) else { return false };
            iv.lower.as_ref().is_none_or(|b| &b.value <= x) && iv.upper.as_ref().is_none_or(|b| x <= &b.value)
        })
    }
}

/// A guard atom `lhs op rhs` with `op` one of `<, <=, >, >=`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardAtom {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

impl GuardAtom {
    pub fn formula(&self) -> Formula {
        Formula::cmp(self.lhs.clone(), self.op, self.rhs.clone())
    }
}

impl std::fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub index: usize,
    pub guard: Vec<GuardAtom>,
    pub dynamics: Vec<Expr>,
}

impl Region {
    pub fn guard_formulas(&self) -> Vec<Formula> {
        self.guard.iter().map(GuardAtom::formula).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDef {
    pub time: TimeKind,
    pub state: Vec<String>,
    pub regions: Vec<Region>,
    pub domain: Domain,
}

/// Parameter assignment for a template.
pub type ParamValues = BTreeMap<String, Rational>;

/// `V(x; p) = Σ pᵢ·φᵢ(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub params: Vec<String>,
    pub basis: Vec<Expr>,
}

impl Template {
    /// Symbolic candidate with parameters as [`Expr::Param`] leaves.
    pub fn candidate(&self) -> Expr {
        let terms = self.params.iter().zip(&self.basis).map(|(p, phi)| Expr::product(vec![Expr::param(p), phi.clone()])).collect();
        Expr::sum(terms).simplify()
    }

    /// `V(x; values)`, simplified.
    pub fn instantiate(&self, values: &ParamValues) -> Result<Expr, ExprError> {
        for p in &self.params {
            if !values.contains_key(p) {
                return Err(ExprError::Unbound(p.clone()));
            }
        }
        let bindings = values.iter().map(|(k, v)| (k.clone(), Expr::Const(v.clone()))).collect();
        Ok(self.candidate().substitute(&bindings).simplify())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub system: SystemDef,
    pub template: Template,
    pub approx: ApproxOrders,
    pub cegis: CegisConfig,
}

impl ProblemFile {
    pub fn state(&self) -> &[String] {
        &self.system.state
    }

    pub fn params(&self) -> &[String] {
        &self.template.params
    }

    pub fn origin(&self) -> Point {
        Point::from_pairs(self.system.state.iter().map(|v| (v.clone(), Rational::zero())))
    }

    /// Parse `"p1=1/2,p2=1/4"` into a full parameter assignment.
    pub fn parse_candidate(&self, text: &str) -> Result<ParamValues, ProblemError> {
        let mut out = ParamValues::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| ProblemError::Schema(format!("candidate entry `{part}` is not of the form name=value")))?;
            let k = k.trim();
            if !self.template.params.iter().any(|p| p == k) {
                return Err(ProblemError::UndeclaredSymbol { context: "candidate".into(), symbol: k.into() });
            }
            let v: Rational = v.trim().parse().map_err(|e| ProblemError::Schema(format!("candidate `{k}`: {e}")))?;
            if out.insert(k.to_string(), v).is_some() {
                return Err(ProblemError::Schema(format!("candidate binds `{k}` twice")));
            }
        }
        for p in &self.template.params {
            if !out.contains_key(p) {
                return Err(ProblemError::Schema(format!("candidate does not bind parameter `{p}`")));
            }
        }
        Ok(out)
    }

    /// Parameter assignment from an ordered vector.
    pub fn params_from_vec(&self, values: &[Rational]) -> Result<ParamValues, ProblemError> {
        if values.len() != self.template.params.len() {
            return Err(ProblemError::Schema(format!(
                "expected {} parameter values, got {}",
                self.template.params.len(),
                values.len()
            )));
        }
        Ok(self.template.params.iter().cloned().zip(values.iter().cloned()).collect())
    }

    /// Check that the template vanishes at the origin for every parameter
    /// value.
    pub(crate) fn check_template_at_origin(&self) -> Result<(), ProblemError> {
        let origin = self.origin();
        for (index, phi) in self.template.basis.iter().enumerate() {
            let value = eval_rational(phi, &origin)?;
            if !value.is_zero() {
                return Err(ProblemError::TemplateNonzeroAtOrigin { index, basis: phi.to_string(), value });
            }
        }
        Ok(())
    }
}

/// `x ≠ 0` as the disjunction `x₁ ≠ 0 ∨ … ∨ xₙ ≠ 0`.
pub fn origin_exclusion<S: AsRef<str>>(vars: &[S]) -> Result<Formula, ProblemError> {
    if vars.is_empty() {
        return Err(ProblemError::EmptyState);
    }
    Ok(Formula::or(vars.iter().map(|v| Formula::cmp_zero(Expr::var(v.as_ref()), CmpOp::Ne)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_exclusion_scalar() {
        assert_eq!(origin_exclusion(&["x"]).unwrap(), Formula::cmp_zero(Expr::var("x"), CmpOp::Ne));
    }

    #[test]
    fn origin_exclusion_plane() {
        let f = origin_exclusion(&["x1", "x2"]).unwrap();
        assert_eq!(f.to_string(), "(x1 != 0 or x2 != 0)");
        let at = |a: i64, b: i64| Point::from_pairs([("x1", Rational::from(a)), ("x2", Rational::from(b))]);
        assert!(!f.holds(&at(0, 0)).unwrap());
        assert!(f.holds(&at(0, 1)).unwrap());
    }

    #[test]
    fn origin_exclusion_empty() {
        assert!(matches!(origin_exclusion::<&str>(&[]), Err(ProblemError::EmptyState)));
    }
}
