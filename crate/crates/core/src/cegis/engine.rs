//! The verifier/learner alternation and certificate checking.

use std::path::Path;

use crate::expr::Expr;
use crate::formula::Formula;
use crate::problem::{ParamValues, ProblemFile};
use crate::rational::Rational;
use crate::smt::{emit, run_solver, Model, SmtScript, SolverCommand, SolverResult, LOGIC};

use super::artifacts::{iteration_tag, region_script_name, ArtifactDir, CertificateFile, RegionProof, Trace, TraceEntry, TraceRegion};
use super::obligation::{
    bind_params, learner_constraints, params_satisfy, stability_deficit, validate_counterexample, verifier_assertions, Obligation,
};
use super::{initial_candidate, Certificate, CegisConfig, CegisError, Counterexample, Outcome, Phase};

/// How to reach the solver and which decrease condition to demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub cmd: SolverCommand,
    pub timeout_ms: u64,
    pub asymptotic: bool,
}

impl SolverOptions {
    pub fn from_config(config: &CegisConfig) -> Result<Self, CegisError> {
        Ok(SolverOptions {
            cmd: SolverCommand::resolve(config.solver_cmd.as_deref())?,
            timeout_ms: config.timeout_ms,
            asymptotic: config.asymptotic,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionVerdict {
    Unsat,
    Counterexample(Counterexample),
    Unknown(String),
}

impl RegionVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            RegionVerdict::Unsat => "unsat",
            RegionVerdict::Counterexample(_) => "sat",
            RegionVerdict::Unknown(_) => "unknown",
        }
    }
}

/// One region query with the scripts that were sent, named as they are
/// stored in an artifact directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCheck {
    pub region: usize,
    pub verdict: RegionVerdict,
    pub scripts: Vec<(String, SmtScript)>,
}

impl RegionCheck {
    fn summary(&self) -> TraceRegion {
        TraceRegion {
            region: self.region,
            verdict: self.verdict.name().to_string(),
            scripts: self.scripts.iter().map(|(n, _)| n.clone()).collect(),
            reason: match &self.verdict {
                RegionVerdict::Unknown(r) => Some(r.clone()),
                _ => None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LearnResult {
    Learned(ParamValues),
    Infeasible,
    Unknown(String),
}

impl LearnResult {
    pub fn name(&self) -> &'static str {
        match self {
            LearnResult::Learned(_) => "sat",
            LearnResult::Infeasible => "unsat",
            LearnResult::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    Valid,
    Invalid(Counterexample),
    Unknown { region: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub params: ParamValues,
    pub v: Expr,
    pub verdict: CheckVerdict,
    pub regions: Vec<RegionCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Trace,
    pub certificate: Option<CertificateFile>,
}

/// A problem with its obligations precomputed.
pub struct Engine<'a> {
    problem: &'a ProblemFile,
    obligations: Vec<Obligation>,
    opts: SolverOptions,
}

impl<'a> Engine<'a> {
    pub fn new(problem: &'a ProblemFile, opts: SolverOptions) -> Result<Self, CegisError> {
        let obligations =
            (0..problem.system.regions.len()).map(|r| stability_deficit(problem, r)).collect::<Result<Vec<_>, _>>()?;
        Ok(Engine { problem, obligations, opts })
    }

    pub fn problem(&self) -> &ProblemFile {
        self.problem
    }

    pub fn obligations(&self) -> &[Obligation] {
        &self.obligations
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    /// Verifier formulas for one region with the given parameters.
    pub fn verifier_formulas(&self, region: usize, params: &ParamValues) -> Result<Vec<Formula>, CegisError> {
        let ob = &self.obligations[region];
        let v = self.problem.template.instantiate(params)?;
        verifier_assertions(self.problem, ob, &v, &bind_params(&ob.deficit, params), self.opts.asymptotic, false)
    }

    /// Verifier formulas with the parameters left symbolic.
    pub fn symbolic_verifier_formulas(&self, region: usize) -> Result<Vec<Formula>, CegisError> {
        let ob = &self.obligations[region];
        verifier_assertions(self.problem, ob, &self.problem.template.candidate(), &ob.deficit, self.opts.asymptotic, false)
    }

    /// The two learner constraints contributed by a counterexample.
    pub fn learner_constraints(&self, cex: &Counterexample) -> [Formula; 2] {
        learner_constraints(self.problem, &self.obligations[cex.region], cex, self.opts.asymptotic)
    }

    /// Exact check that `cex` refutes the candidate `params`.
    pub fn validate_counterexample(&self, params: &ParamValues, cex: &Counterexample) -> Result<(), String> {
        let ob = self.obligations.get(cex.region).ok_or_else(|| format!("no region {}", cex.region))?;
        let v = self.problem.template.instantiate(params).map_err(|e| e.to_string())?;
        validate_counterexample(self.problem, ob, &v, &bind_params(&ob.deficit, params), cex, self.opts.asymptotic)
    }

    fn counterexample_from(&self, ob: &Obligation, m: &Model) -> Counterexample {
        let get = |name: &str| m.get(name).cloned().unwrap_or_else(Rational::zero);
        Counterexample {
            region: ob.region,
            point: self.problem.system.state.iter().map(|v| (v.clone(), get(v))).collect(),
            eps: ob.eps_bounds.iter().map(|b| (b.id, get(&format!("eps_{}", b.id)))).collect(),
        }
    }

    fn verify_region(&self, ob: &Obligation, v: &Expr, deficit: &Expr, tag: &str) -> Result<RegionCheck, CegisError> {
        let asym = self.opts.asymptotic;
        let mut scripts = Vec::new();
        let mut verdict = None;
        for open in [false, true] {
            let script = emit(&verifier_assertions(self.problem, ob, v, deficit, asym, open)?, LOGIC)?;
            let result = run_solver(&script, &self.opts.cmd, self.opts.timeout_ms)?;
            scripts.push((region_script_name(tag, ob.region, open), script));
            match result {
                SolverResult::Unsat if open => {
                    verdict = Some(RegionVerdict::Unknown("violations found only at irrational points".into()));
                }
                SolverResult::Unsat => verdict = Some(RegionVerdict::Unsat),
                SolverResult::Unknown(r) => verdict = Some(RegionVerdict::Unknown(r)),
                SolverResult::Sat(m) => {
                    let cex = self.counterexample_from(ob, &m);
                    match validate_counterexample(self.problem, ob, v, deficit, &cex, asym) {
                        Ok(()) => verdict = Some(RegionVerdict::Counterexample(cex)),
                        Err(msg) if m.is_exact() => return Err(CegisError::Soundness(msg)),
                        // Rounded algebraic model; retry on the open relaxation.
                        Err(_) if !open => continue,
                        Err(_) => verdict = Some(RegionVerdict::Unknown("irrational counterexample".into())),
                    }
                }
            }
            break;
        }
        Ok(RegionCheck { region: ob.region, verdict: verdict.expect("loop always sets a verdict"), scripts })
    }

    /// Query every region; regions run concurrently and results come back in
    /// region order.
    fn verify_tagged(&self, params: &ParamValues, tag: &str) -> Result<Vec<RegionCheck>, CegisError> {
        let v = self.problem.template.instantiate(params)?;
        let deficits: Vec<Expr> = self.obligations.iter().map(|ob| bind_params(&ob.deficit, params)).collect();
        if self.obligations.len() == 1 {
            return Ok(vec![self.verify_region(&self.obligations[0], &v, &deficits[0], tag)?]);
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = self
                .obligations
                .iter()
                .zip(&deficits)
                .map(|(ob, d)| {
                    let v = &v;
                    s.spawn(move || self.verify_region(ob, v, d, tag))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("verifier thread panicked")).collect()
        })
    }

    pub fn verify(&self, params: &ParamValues) -> Result<Vec<RegionCheck>, CegisError> {
        self.verify_tagged(params, "verify")
    }

    /// One learner query over the given counterexamples.
    pub fn learn(&self, cexs: &[Counterexample]) -> Result<(SmtScript, LearnResult), CegisError> {
        let constraints: Vec<Formula> = cexs.iter().flat_map(|c| self.learner_constraints(c)).collect();
        let script = emit(&constraints, LOGIC)?;
        let result = match run_solver(&script, &self.opts.cmd, self.opts.timeout_ms)? {
            SolverResult::Unsat => LearnResult::Infeasible,
            SolverResult::Unknown(r) => LearnResult::Unknown(r),
            SolverResult::Sat(m) => {
                let params: ParamValues = self
                    .problem
                    .params()
                    .iter()
                    .map(|p| (p.clone(), m.get(p).cloned().unwrap_or_else(Rational::zero)))
                    .collect();
                if params_satisfy(&constraints, &params)? {
                    LearnResult::Learned(params)
                } else if m.is_exact() {
                    return Err(CegisError::Soundness(format!("learner model {params:?} violates its own constraints")));
                } else {
                    LearnResult::Unknown("irrational learner model".into())
                }
            }
        };
        Ok((script, result))
    }

    fn check_tagged(&self, params: &ParamValues, tag: &str) -> Result<CheckReport, CegisError> {
        let regions = self.verify_tagged(params, tag)?;
        let verdict = regions
            .iter()
            .find_map(|r| match &r.verdict {
                RegionVerdict::Counterexample(c) => Some(CheckVerdict::Invalid(c.clone())),
                _ => None,
            })
            .or_else(|| {
                regions.iter().find_map(|r| match &r.verdict {
                    RegionVerdict::Unknown(reason) => Some(CheckVerdict::Unknown { region: r.region, reason: reason.clone() }),
                    _ => None,
                })
            })
            .unwrap_or(CheckVerdict::Valid);
        Ok(CheckReport { params: params.clone(), v: self.problem.template.instantiate(params)?, verdict, regions })
    }

    /// Independent check of a candidate with fresh solver sessions.
    pub fn check(&self, params: &ParamValues) -> Result<CheckReport, CegisError> {
        self.check_tagged(params, "check")
    }

    /// The full loop. Scripts, `trace.json` and (on success)
    /// `certificate.json` go to `out` when given.
    pub fn run(&self, config: &CegisConfig, out: Option<&ArtifactDir>) -> Result<RunResult, CegisError> {
        let write_scripts = |checks: &[RegionCheck]| -> Result<(), CegisError> {
            if let Some(dir) = out {
                for (name, script) in checks.iter().flat_map(|c| &c.scripts) {
                    dir.write(name, &script.text())?;
                }
            }
            Ok(())
        };

        let initial = initial_candidate(self.problem, config)?;
        let mut params = initial.clone();
        let mut cexs: Vec<Counterexample> = Vec::new();
        let mut entries = Vec::new();
        let mut certificate = None;

        let outcome = loop {
            let iteration = cexs.len();
            let checks = self.verify_tagged(&params, &iteration_tag("verify", iteration))?;
            write_scripts(&checks)?;
            let mut entry = TraceEntry {
                iteration,
                candidate: params.clone(),
                regions: checks.iter().map(RegionCheck::summary).collect(),
                counterexample: None,
                learner: None,
                learner_script: None,
            };

            let first_cex = checks.iter().find_map(|c| match &c.verdict {
                RegionVerdict::Counterexample(cex) => Some(cex.clone()),
                _ => None,
            });
            let Some(cex) = first_cex else {
                entries.push(entry);
                if let Some((region, reason)) = checks.iter().find_map(|c| match &c.verdict {
                    RegionVerdict::Unknown(r) => Some((c.region, r.clone())),
                    _ => None,
                }) {
                    break Outcome::SolverUnknown { phase: Phase::Verify, iteration, region: Some(region), reason };
                }
                let report = self.check_tagged(&params, "recheck")?;
                write_scripts(&report.regions)?;
                match report.verdict {
                    CheckVerdict::Valid => {}
                    CheckVerdict::Invalid(c) => {
                        return Err(CegisError::Soundness(format!("fresh re-verification refuted the candidate at {c}")));
                    }
                    CheckVerdict::Unknown { region, reason } => {
                        break Outcome::SolverUnknown { phase: Phase::Recheck, iteration, region: Some(region), reason };
                    }
                }
                let proofs: Vec<RegionProof> = report
                    .regions
                    .iter()
                    .map(|r| {
                        let (name, script) = r.scripts.last().expect("every check sends a script");
                        RegionProof {
                            region: r.region,
                            verdict: r.verdict.name().to_string(),
                            script_file: name.clone(),
                            script: script.text(),
                        }
                    })
                    .collect();
                let cert = Certificate { params: params.clone(), v: report.v.clone(), regions: proofs, iterations: iteration };
                certificate = Some(CertificateFile {
                    params: cert.params.clone(),
                    v: cert.v.to_string(),
                    iterations: iteration,
                    regions: cert.regions.clone(),
                    trace: entries.clone(),
                });
                break Outcome::Proved(cert);
            };

            cexs.push(cex.clone());
            entry.counterexample = Some(cex);
            if cexs.len() > config.max_iter as usize {
                entries.push(entry);
                break Outcome::Exhausted { max_iter: config.max_iter, last_candidate: params };
            }

            let keep = if config.window == 0 { cexs.len() } else { (config.window as usize).min(cexs.len()) };
            let (script, learned) = self.learn(&cexs[cexs.len() - keep..])?;
            let name = format!("{}.smt2", iteration_tag("learn", iteration));
            if let Some(dir) = out {
                dir.write(&name, &script.text())?;
            }
            entry.learner = Some(learned.name().to_string());
            entry.learner_script = Some(name);
            entries.push(entry);
            match learned {
                LearnResult::Learned(next) => params = next,
                LearnResult::Infeasible => {
                    break Outcome::TemplateInfeasible { iteration: cexs.len(), counterexamples: cexs };
                }
                LearnResult::Unknown(reason) => {
                    break Outcome::SolverUnknown { phase: Phase::Learn, iteration: cexs.len(), region: None, reason };
                }
            }
        };

        let trace = Trace {
            problem: self.problem.name.clone(),
            solver: self.opts.cmd.to_string(),
            seed: config.seed,
            max_iter: config.max_iter,
            window: config.window,
            asymptotic: self.opts.asymptotic,
            initial_candidate: initial,
            entries,
            outcome: outcome.kind().to_string(),
            iterations: outcome.iterations(),
        };
        if let Some(dir) = out {
            dir.write_json("trace.json", &trace)?;
            if let Some(cert) = &certificate {
                dir.write_json("certificate.json", cert)?;
            }
        }
        Ok(RunResult { outcome, trace, certificate })
    }
}

pub fn verify_candidate(problem: &ProblemFile, params: &ParamValues, opts: &SolverOptions) -> Result<Vec<RegionCheck>, CegisError> {
    Engine::new(problem, opts.clone())?.verify(params)
}

pub fn learn_candidate(problem: &ProblemFile, cexs: &[Counterexample], opts: &SolverOptions) -> Result<LearnResult, CegisError> {
    Ok(Engine::new(problem, opts.clone())?.learn(cexs)?.1)
}

pub fn check_certificate(problem: &ProblemFile, params: &ParamValues, opts: &SolverOptions) -> Result<CheckReport, CegisError> {
    Engine::new(problem, opts.clone())?.check(params)
}

/// Run the loop with the problem's own solver settings and `config`.
pub fn cegis(problem: &ProblemFile, config: &CegisConfig) -> Result<Outcome, CegisError> {
    Ok(run_cegis(problem, config, None)?.outcome)
}

pub fn run_cegis(problem: &ProblemFile, config: &CegisConfig, out: Option<&Path>) -> Result<RunResult, CegisError> {
    let engine = Engine::new(problem, SolverOptions::from_config(config)?)?;
    let dir = out.map(ArtifactDir::create).transpose()?;
    engine.run(config, dir.as_ref())
}
