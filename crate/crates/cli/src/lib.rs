//! Command-line front end: `synth`, `check` and `explain`.

pub mod args;
pub mod explain;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use lyapsyn_core::cegis::ArtifactDir;
use lyapsyn_core::smt::SmtError;
use lyapsyn_core::{load_problem, CegisConfig, CegisError, CheckVerdict, Engine, Outcome, ProblemError, ProblemFile, Rational, SolverOptions};
use thiserror::Error;

pub use args::{CheckArgs, Cli, Command, ExplainArgs, SolverArgs, SynthArgs};
pub use report::{check_exit_code, exit, outcome_exit_code, RegionReport, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Engine(#[from] CegisError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Problem(_) => exit::USAGE,
            CliError::Engine(e) => match e {
                CegisError::Smt(SmtError::Spawn { .. } | SmtError::EmptyCommand) => exit::USAGE,
                CegisError::Smt(_) | CegisError::Soundness(_) => exit::UNKNOWN,
                CegisError::Problem(_) | CegisError::Approx(_) | CegisError::Expr(_) | CegisError::Io { .. } => exit::USAGE,
            },
        }
    }
}

/// Parse `"-1,1/2"` exactly.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| CliError::Usage(format!("--initial-params: {e}"))))
        .collect()
}

fn load(path: &Path) -> Result<ProblemFile, CliError> {
    Ok(load_problem(path)?)
}

fn apply_solver_args(config: &mut CegisConfig, args: &SolverArgs) {
    if let Some(cmd) = &args.solver_cmd {
        config.solver_cmd = Some(cmd.clone());
    }
    if let Some(t) = args.timeout_ms {
        config.timeout_ms = t;
    }
    if args.asymptotic {
        config.asymptotic = true;
    }
}

/// File configuration overridden by flags.
pub fn synth_config(problem: &ProblemFile, args: &SynthArgs) -> Result<CegisConfig, CliError> {
    let mut config = problem.cegis.clone();
    if let Some(m) = args.max_iter {
        if m == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        config.max_iter = m;
    }
    if let Some(w) = args.window {
        config.window = w;
    }
    if let Some(text) = &args.initial_params {
        let values = parse_rational_list(text)?;
        if values.len() != problem.params().len() {
            return Err(CliError::Usage(format!(
                "--initial-params has {} values for {} parameters",
                values.len(),
                problem.params().len()
            )));
        }
        config.initial_params = Some(values);
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    apply_solver_args(&mut config, &args.solver);
    Ok(config)
}

fn default_out_dir(file: &Path) -> PathBuf {
    let stem = file.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from("runs").join(stem)
}

pub fn synth(args: &SynthArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let problem = load(&args.file)?;
    let config = synth_config(&problem, args)?;
    let out = args.out.clone().unwrap_or_else(|| default_out_dir(&args.file));
    let dir = ArtifactDir::create(&out)?;
    let engine = Engine::new(&problem, SolverOptions::from_config(&config)?)?;
    let run = engine.run(&config, Some(&dir))?;

    let mut artifacts = vec![dir.path("trace.json").display().to_string()];
    if run.certificate.is_some() {
        artifacts.push(dir.path("certificate.json").display().to_string());
    }
    let last_regions = run.trace.entries.last().map(|e| e.regions.iter().map(RegionReport::from).collect()).unwrap_or_default();
    let mut report = Report {
        command: "synth".into(),
        problem: args.file.display().to_string(),
        outcome: run.outcome.kind().into(),
        exit_code: outcome_exit_code(&run.outcome),
        v: None,
        params: None,
        iterations: Some(run.outcome.iterations()),
        wall_time_ms: 0,
        artifacts,
        regions: last_regions,
        counterexample: None,
        message: None,
    };
    match &run.outcome {
        Outcome::Proved(cert) => {
            report.v = Some(cert.v.to_string());
            report.params = Some(cert.params.clone());
        }
        Outcome::TemplateInfeasible { counterexamples, .. } => {
            report.counterexample = counterexamples.last().cloned();
            report.message = Some(format!(
                "no parameters satisfy the {} collected counterexamples; the template cannot certify this system",
                counterexamples.len()
            ));
        }
        Outcome::Exhausted { max_iter, last_candidate } => {
            report.v = Some(problem.template.instantiate(last_candidate).map_err(CegisError::from)?.to_string());
            report.params = Some(last_candidate.clone());
            report.message = Some(format!("more than {max_iter} counterexamples collected; last candidate shown"));
        }
        Outcome::SolverUnknown { phase, region, reason, .. } => {
            let at = region.map_or(String::new(), |r| format!(" in region {r}"));
            report.message = Some(format!("solver gave no verdict during {phase}{at}: {reason}"));
        }
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

pub fn check(args: &CheckArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let problem = load(&args.file)?;
    let params = problem.parse_candidate(&args.candidate).map_err(|e| CliError::Usage(format!("--candidate: {e}")))?;
    let mut config = problem.cegis.clone();
    apply_solver_args(&mut config, &args.solver);
    let engine = Engine::new(&problem, SolverOptions::from_config(&config)?)?;
    let result = engine.check(&params)?;

    let mut artifacts = Vec::new();
    if let Some(out) = &args.out {
        let dir = ArtifactDir::create(out)?;
        for (name, script) in result.regions.iter().flat_map(|r| &r.scripts) {
            artifacts.push(dir.write(name, &script.text())?.display().to_string());
        }
    }
    let (outcome, counterexample, message) = match &result.verdict {
        CheckVerdict::Valid => ("valid", None, None),
        CheckVerdict::Invalid(c) => ("invalid", Some(c.clone()), None),
        CheckVerdict::Unknown { region, reason } => {
            ("unknown", None, Some(format!("region {region}: certificate neither confirmed nor refuted ({reason})")))
        }
    };
    Ok(Report {
        command: "check".into(),
        problem: args.file.display().to_string(),
        outcome: outcome.into(),
        exit_code: check_exit_code(&result.verdict),
        v: Some(result.v.to_string()),
        params: Some(params),
        iterations: None,
        wall_time_ms: start.elapsed().as_millis() as u64,
        artifacts,
        regions: result.regions.iter().map(RegionReport::from).collect(),
        counterexample,
        message,
    })
}

pub fn explain(args: &ExplainArgs) -> Result<String, CliError> {
    let problem = load(&args.file)?;
    let engine = Engine::new(&problem, SolverOptions::from_config(&problem.cegis)?)?;
    Ok(explain::explain(&problem, &engine)?)
}

/// Run a parsed command and print its output. Returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let (result, json) = match &cli.command {
        Command::Synth(a) => (synth(a), a.json),
        Command::Check(a) => (check(a), a.json),
        Command::Explain(a) => {
            return match explain(a) {
                Ok(text) => {
                    print!("{text}");
                    exit::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            };
        }
    };
    match result {
        Ok(report) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serialization cannot fail"));
            } else {
                println!("{report}");
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
