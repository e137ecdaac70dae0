//! JSON problem files.
//!
//! ```json
//! {
//!   "time": "continuous",
//!   "state": ["x1", "x2"],
//!   "params": ["p1", "p2"],
//!   "regions": [{ "guard": [], "dynamics": ["x2", "-x1 - x2"] }],
//!   "domain": { "x1": { "min": "-3", "max": "3", "strict": true } },
//!   "template": ["x1^2", "x2^2"],
//!   "approx": { "sin": 3 },
//!   "cegis": { "max_iter": 100, "window": 0, "initial_params": ["0", "0"], "seed": 42, "timeout_ms": 10000 }
//! }
//! ```
//!
//! All numbers that end up in expressions are rational strings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Bound, Domain, GuardAtom, Interval, ProblemError, ProblemFile, Region, SystemDef, Template, TimeKind};
use crate::approx::ApproxOrders;
use crate::cegis::CegisConfig;
use crate::expr::{parse_expr_with_params, Expr};
use crate::formula::CmpOp;
use crate::rational::Rational;

const RESERVED: [&str; 4] = ["exp", "sin", "arctan", "abs"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub time: TimeKind,
    pub state: Vec<String>,
    #[serde(default)]
    pub params: Vec<String>,
    pub regions: Vec<RawRegion>,
    #[serde(default)]
    pub domain: BTreeMap<String, RawInterval>,
    pub template: Vec<String>,
    #[serde(default)]
    pub approx: ApproxOrders,
    #[serde(default)]
    pub cegis: CegisConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRegion {
    #[serde(default)]
    pub guard: Vec<String>,
    pub dynamics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInterval {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<String>,
    #[serde(default = "default_strict")]
    pub strict: bool,
}

fn default_strict() -> bool {
    true
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemFile, ProblemError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
    parse_problem(&text)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let raw: RawProblem = serde_json::from_str(text)?;
    raw.validate()
}

/// Serialize back to the file format. Expressions are written in canonical
/// text, so `parse_problem(dump_problem(p)) == p`.
pub fn dump_problem(p: &ProblemFile) -> String {
    let raw = RawProblem::from(p);
    serde_json::to_string_pretty(&raw).expect("problem serialization cannot fail")
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn split_guard(text: &str) -> Option<(&str, CmpOp, &str)> {
    for op in ["<=", ">=", "<", ">"] {
        if let Some(pos) = text.find(op) {
            let (lhs, rest) = text.split_at(pos);
            let rhs = &rest[op.len()..];
            if rhs.contains(['<', '>', '=']) {
                return None;
            }
            return Some((lhs, CmpOp::parse_guard(op)?, rhs));
        }
    }
    None
}

impl RawProblem {
    fn parse(&self, text: &str, context: &str, allow_params: bool) -> Result<Expr, ProblemError> {
        let params: &[String] = if allow_params { &self.params } else { &[] };
        let e = parse_expr_with_params(text, params).map_err(|source| ProblemError::Parse { context: context.to_string(), source })?;
        let declared: BTreeSet<&str> = self.state.iter().map(String::as_str).collect();
        for v in e.free_vars() {
            if !declared.contains(v.as_str()) {
                return Err(ProblemError::UndeclaredSymbol { context: context.to_string(), symbol: v });
            }
        }
        Ok(e)
    }

    pub fn validate(self) -> Result<ProblemFile, ProblemError> {
        if self.state.is_empty() {
            return Err(ProblemError::Schema("`state` must list at least one variable".into()));
        }
        let mut seen = BTreeSet::new();
        for name in self.state.iter().chain(&self.params) {
            if !is_identifier(name) || RESERVED.contains(&name.as_str()) || name.starts_with("eps_") {
                return Err(ProblemError::Schema(format!("`{name}` is not a usable symbol name")));
            }
            if !seen.insert(name.as_str()) {
                return Err(ProblemError::Schema(format!("symbol `{name}` declared twice")));
            }
        }
        let n = self.state.len();

        if self.regions.is_empty() {
            return Err(ProblemError::Schema("`regions` must not be empty".into()));
        }
        if self.regions.len() == 1 && !self.regions[0].guard.is_empty() {
            return Err(ProblemError::Schema("a single-region system must not carry a guard".into()));
        }
        let mut regions = Vec::with_capacity(self.regions.len());
        for (index, raw) in self.regions.iter().enumerate() {
            if raw.dynamics.len() != n {
                return Err(ProblemError::DimensionMismatch { region: index, expected: n, found: raw.dynamics.len() });
            }
            let mut guard = Vec::new();
            for g in &raw.guard {
                let context = format!("region {index} guard `{g}`");
                let (lhs, op, rhs) = split_guard(g)
                    .ok_or_else(|| ProblemError::Schema(format!("{context}: expected exactly one of <, <=, >, >=")))?;
                let lhs = self.parse(lhs, &context, false)?;
                let rhs = self.parse(rhs, &context, false)?;
                if !lhs.is_polynomial() || !rhs.is_polynomial() {
                    return Err(ProblemError::Schema(format!("{context}: guards must be polynomial")));
                }
                guard.push(GuardAtom { lhs, op, rhs });
            }
            let dynamics = raw
                .dynamics
                .iter()
                .enumerate()
                .map(|(i, d)| self.parse(d, &format!("region {index} dynamics[{i}]"), false))
                .collect::<Result<Vec<_>, _>>()?;
            regions.push(Region { index, guard, dynamics });
        }

        let mut domain = Domain::default();
        for (var, iv) in &self.domain {
            if !self.state.contains(var) {
                return Err(ProblemError::UndeclaredSymbol { context: "domain".into(), symbol: var.clone() });
            }
            let bound = |s: &Option<String>| -> Result<Option<Bound>, ProblemError> {
                s.as_ref()
                    .map(|t| {
                        t.parse::<Rational>()
                            .map(|value| Bound { value, strict: iv.strict })
                            .map_err(|e| ProblemError::Schema(format!("domain `{var}`: {e}")))
                    })
                    .transpose()
            };
            let interval = Interval { lower: bound(&iv.min)?, upper: bound(&iv.max)? };
            if let (Some(lo), Some(hi)) = (&interval.lower, &interval.upper) {
                if lo.value >= hi.value {
                    return Err(ProblemError::Schema(format!("domain `{var}`: min must be below max")));
                }
            }
            domain.intervals.insert(var.clone(), interval);
        }

        if self.template.len() != self.params.len() {
            return Err(ProblemError::Schema(format!(
                "template has {} basis functions but {} parameters are declared",
                self.template.len(),
                self.params.len()
            )));
        }
        if self.template.is_empty() {
            return Err(ProblemError::Schema("template must have at least one basis function".into()));
        }
        let mut basis = Vec::with_capacity(self.template.len());
        for (index, t) in self.template.iter().enumerate() {
            let context = format!("template[{index}]");
            let phi = self.parse(t, &context, true)?;
            if let Some(p) = phi.free_params().into_iter().next() {
                return Err(ProblemError::Schema(format!("{context}: basis functions must not mention parameter `{p}`")));
            }
            if phi.has_transcendental() {
                return Err(ProblemError::Schema(format!("{context}: basis functions must not contain exp, sin or arctan")));
            }
            if phi.has_abs() && self.time == TimeKind::Continuous {
                return Err(ProblemError::AbsInContinuousTemplate { index, basis: phi.to_string() });
            }
            basis.push(phi);
        }

        if self.cegis.max_iter == 0 {
            return Err(ProblemError::Schema("cegis.max_iter must be at least 1".into()));
        }
        if let Some(init) = &self.cegis.initial_params {
            if init.len() != self.params.len() {
                return Err(ProblemError::Schema(format!(
                    "cegis.initial_params has {} entries for {} parameters",
                    init.len(),
                    self.params.len()
                )));
            }
        }

        let problem = ProblemFile {
            name: self.name.clone(),
            system: SystemDef { time: self.time, state: self.state.clone(), regions, domain },
            template: Template { params: self.params.clone(), basis },
            approx: self.approx.clone(),
            cegis: self.cegis.clone(),
        };
        problem.check_template_at_origin()?;
        Ok(problem)
    }
}

impl From<&ProblemFile> for RawProblem {
    fn from(p: &ProblemFile) -> Self {
        RawProblem {
            name: p.name.clone(),
            time: p.system.time,
            state: p.system.state.clone(),
            params: p.template.params.clone(),
            regions: p
                .system
                .regions
                .iter()
                .map(|r| RawRegion {
                    guard: r.guard.iter().map(GuardAtom::to_string).collect(),
                    dynamics: r.dynamics.iter().map(Expr::to_string).collect(),
                })
                .collect(),
            domain: p
                .system
                .domain
                .intervals
                .iter()
                .map(|(v, iv)| {
                    let strict = iv.lower.as_ref().or(iv.upper.as_ref()).is_none_or(|b| b.strict);
                    (
                        v.clone(),
                        RawInterval {
                            min: iv.lower.as_ref().map(|b| b.value.to_string()),
                            max: iv.upper.as_ref().map(|b| b.value.to_string()),
                            strict,
                        },
                    )
                })
                .collect(),
            template: p.template.basis.iter().map(Expr::to_string).collect(),
            approx: p.approx.clone(),
            cegis: p.cegis.clone(),
        }
    }
}
