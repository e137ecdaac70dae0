//! Counterexample-guided synthesis: a verifier searches for states that
//! refute the current candidate, a learner picks parameters consistent with
//! every counterexample seen so far.

mod artifacts;
mod engine;
mod obligation;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::ApproxError;
use crate::expr::{Expr, ExprError, Point};
use crate::problem::{ParamValues, ProblemError, ProblemFile};
use crate::rational::Rational;
use crate::smt::SmtError;

pub use artifacts::{ArtifactDir, CertificateFile, RegionProof, Trace, TraceEntry, TraceRegion};
pub use engine::{
    cegis, check_certificate, learn_candidate, run_cegis, verify_candidate, CheckReport, CheckVerdict, Engine, LearnResult,
    RegionCheck, RegionVerdict, RunResult, SolverOptions,
};
pub use obligation::{stability_deficit, Obligation};

#[derive(Debug, Error)]
pub enum CegisError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// The solver answered something that fails exact re-checking.
    #[error("soundness check failed: {0}")]
    Soundness(String),
}

fn default_max_iter() -> u32 {
    100
}

fn default_timeout_ms() -> u64 {
    10_000
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Loop settings. Stored in the problem file's `cegis` object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CegisConfig {
    /// Stop once more than this many counterexamples were collected.
    #[serde(default = "default_max_iter")]
    pub max_iter: u32,
    /// Keep only the most recent `window` counterexamples; 0 keeps all.
    #[serde(default)]
    pub window: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_params: Option<Vec<Rational>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_cmd: Option<String>,
    /// Demand a strictly negative deficit (asymptotic stability) instead of
    /// a non-positive one.
    #[serde(default, skip_serializing_if = "is_false")]
    pub asymptotic: bool,
}

impl Default for CegisConfig {
    fn default() -> Self {
        CegisConfig {
            max_iter: default_max_iter(),
            window: 0,
            initial_params: None,
            seed: 0,
            timeout_ms: default_timeout_ms(),
            solver_cmd: None,
            asymptotic: false,
        }
    }
}

/// Initial parameters: the configured vector, or seeded draws `k/16` with
/// `k` uniform in `[-16, 16]`.
pub fn initial_candidate(problem: &ProblemFile, config: &CegisConfig) -> Result<ParamValues, CegisError> {
    if let Some(init) = &config.initial_params {
        return Ok(problem.params_from_vec(init)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(problem.params().iter().map(|p| (p.clone(), Rational::new(rng.gen_range(-16i64..=16), 16))).collect())
}

/// A state (and ε assignment) refuting a candidate in one region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub region: usize,
    pub point: BTreeMap<String, Rational>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eps: BTreeMap<u32, Rational>,
}

impl Counterexample {
    pub fn as_point(&self) -> Point {
        Point { values: self.point.clone(), eps: self.eps.clone() }
    }
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "region {}: ", self.region)?;
        let parts: Vec<String> = self
            .point
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .chain(self.eps.iter().map(|(k, v)| format!("eps_{k}={v}")))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Verify,
    Learn,
    Recheck,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Verify => "verify",
            Phase::Learn => "learn",
            Phase::Recheck => "recheck",
        })
    }
}

/// Proof of a candidate. `regions` holds the unsat scripts of a fresh
/// re-verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub params: ParamValues,
    pub v: Expr,
    pub regions: Vec<RegionProof>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Certificate),
    /// The learner found no parameters consistent with the counterexamples.
    TemplateInfeasible { iteration: usize, counterexamples: Vec<Counterexample> },
    /// More than `max_iter` counterexamples were collected.
    Exhausted { max_iter: u32, last_candidate: ParamValues },
    SolverUnknown { phase: Phase, iteration: usize, region: Option<usize>, reason: String },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Proved(_) => "proved",
            Outcome::TemplateInfeasible { .. } => "template_infeasible",
            Outcome::Exhausted { .. } => "exhausted",
            Outcome::SolverUnknown { .. } => "solver_unknown",
        }
    }

    /// Learner rounds performed.
    pub fn iterations(&self) -> usize {
        match self {
            Outcome::Proved(c) => c.iterations,
            Outcome::TemplateInfeasible { iteration, .. } | Outcome::SolverUnknown { iteration, .. } => *iteration,
            Outcome::Exhausted { max_iter, .. } => *max_iter as usize,
        }
    }
}
