use std::fmt;

use lyapsyn_core::cegis::TraceRegion;
use lyapsyn_core::{CheckVerdict, Counterexample, Outcome, ParamValues, RegionCheck, RegionVerdict};
use serde::{Deserialize, Serialize};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const REFUTED: i32 = 1;
    pub const EXHAUSTED: i32 = 2;
    pub const UNKNOWN: i32 = 3;
    pub const USAGE: i32 = 4;
}

pub fn outcome_exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Proved(_) => exit::SUCCESS,
        Outcome::TemplateInfeasible { .. } => exit::REFUTED,
        Outcome::Exhausted { .. } => exit::EXHAUSTED,
        Outcome::SolverUnknown { .. } => exit::UNKNOWN,
    }
}

pub fn check_exit_code(verdict: &CheckVerdict) -> i32 {
    match verdict {
        CheckVerdict::Valid => exit::SUCCESS,
        CheckVerdict::Invalid(_) => exit::REFUTED,
        CheckVerdict::Unknown { .. } => exit::UNKNOWN,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: usize,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl From<&TraceRegion> for RegionReport {
    fn from(r: &TraceRegion) -> Self {
        RegionReport { region: r.region, verdict: r.verdict.clone(), reason: r.reason.clone() }
    }
}

impl From<&RegionCheck> for RegionReport {
    fn from(r: &RegionCheck) -> Self {
        RegionReport {
            region: r.region,
            verdict: r.verdict.name().to_string(),
            reason: match &r.verdict {
                RegionVerdict::Unknown(reason) => Some(reason.clone()),
                _ => None,
            },
        }
    }
}

/// What `synth` and `check` print. Stable under `--json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub problem: String,
    /// proved, template_infeasible, exhausted, solver_unknown for `synth`;
    /// valid, invalid, unknown for `check`.
    pub outcome: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamValues>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub wall_time_ms: u64,
    #[serde(default)]
    pub artifacts: Vec<String>,
    #[serde(default)]
    pub regions: Vec<RegionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.command, self.outcome)?;
        if let Some(v) = &self.v {
            writeln!(f, "  V = {v}")?;
        }
        if let Some(ps) = &self.params {
            let parts: Vec<String> = ps.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            writeln!(f, "  params: {}", parts.join(", "))?;
        }
        if let Some(n) = self.iterations {
            writeln!(f, "  iterations: {n}")?;
        }
        for r in &self.regions {
            match &r.reason {
                Some(reason) => writeln!(f, "  region {}: {} ({reason})", r.region, r.verdict)?,
                None => writeln!(f, "  region {}: {}", r.region, r.verdict)?,
            }
        }
        if let Some(c) = &self.counterexample {
            writeln!(f, "  counterexample: {c}")?;
        }
        if let Some(m) = &self.message {
            writeln!(f, "  {m}")?;
        }
        for a in &self.artifacts {
            writeln!(f, "  artifact: {a}")?;
        }
        write!(f, "  wall time: {} ms", self.wall_time_ms)
    }
}
