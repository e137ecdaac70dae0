//! Solver subprocess: one fresh process per query.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use super::model::{parse_model, Model};
use super::sexpr::parse_all;
use super::{SmtError, SmtScript};

pub const DEFAULT_SOLVER: &str = "z3 -in";
pub const SOLVER_ENV: &str = "LYAPSYN_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl SolverResult {
    pub fn verdict(&self) -> &'static str {
        match self {
            SolverResult::Sat(_) => "sat",
            SolverResult::Unsat => "unsat",
            SolverResult::Unknown(_) => "unknown",
        }
    }
}

/// Program plus arguments, split on whitespace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCommand {
    pub fn parse(cmd: &str) -> Result<Self, SmtError> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or(SmtError::EmptyCommand)?;
        Ok(SolverCommand { program, args: parts.collect() })
    }

    /// Explicit command, else `LYAPSYN_SOLVER`, else `z3 -in`.
    pub fn resolve(explicit: Option<&str>) -> Result<Self, SmtError> {
        match explicit {
            Some(c) => Self::parse(c),
            None => Self::parse(&std::env::var(SOLVER_ENV).unwrap_or_else(|_| DEFAULT_SOLVER.to_string())),
        }
    }
}

impl std::fmt::Display for SolverCommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.program)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Run `script` and parse the verdict. A timeout yields `Unknown("timeout")`.
pub fn run_solver(script: &SmtScript, cmd: &SolverCommand, timeout_ms: u64) -> Result<SolverResult, SmtError> {
    let mut child = Command::new(&cmd.program)
        .args(&cmd.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SmtError::Spawn { cmd: cmd.to_string(), source })?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let text = script.text();
    let writer = std::thread::spawn(move || stdin.write_all(text.as_bytes()));
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stderr.read_to_string(&mut s).map(|_| s)
    });

    let status = match child.wait_timeout(Duration::from_millis(timeout_ms))? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SolverResult::Unknown("timeout".into()));
        }
    };
    // A solver that exits early closes its stdin; that is not our error.
    let _ = writer.join();
    let stdout = out_reader.join().expect("reader thread")?;
    let stderr = err_reader.join().expect("reader thread")?;

    match parse_output(&stdout)? {
        Some(result) => Ok(result),
        None => Err(SmtError::Failed { status: status.to_string(), stdout, stderr }),
    }
}

/// Interpret solver stdout. `None` when no verdict line is present.
///
/// The verdict on the first line decides; on `unsat` a solver complains
/// about `(get-model)` and exits nonzero, which is expected.
pub fn parse_output(stdout: &str) -> Result<Option<SolverResult>, SmtError> {
    let mut lines = stdout.lines().skip_while(|l| l.trim().is_empty());
    let Some(first) = lines.next() else { return Ok(None) };
    match first.trim() {
        "unsat" => Ok(Some(SolverResult::Unsat)),
        "unknown" => Ok(Some(SolverResult::Unknown("solver returned unknown".into()))),
        "sat" => {
            let rest: Vec<&str> = lines.collect();
            let rest = rest.join("\n");
            let sexprs = parse_all(&rest).map_err(SmtError::MalformedModel)?;
            let model = sexprs
                .iter()
                .find(|s| s.head() != Some("error"))
                .ok_or_else(|| SmtError::MalformedModel("sat without a model".into()))?;
            Ok(Some(SolverResult::Sat(parse_model(model)?)))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    #[test]
    fn verdict_lines() {
        assert_eq!(parse_output("unsat\n(error \"line 9 column 10: model is not available\")\n").unwrap(), Some(SolverResult::Unsat));
        assert!(matches!(parse_output("unknown\n").unwrap(), Some(SolverResult::Unknown(_))));
        assert_eq!(parse_output("(error \"boom\")\n").unwrap(), None);
        assert_eq!(parse_output("").unwrap(), None);
    }

    #[test]
    fn sat_with_model() {
        let out = "sat\n(\n  (define-fun x1 () Real\n    (/ 1.0 2.0))\n  (define-fun x2 () Real\n    (- 1.0))\n)\n";
        let Some(SolverResult::Sat(m)) = parse_output(out).unwrap() else { panic!() };
        assert_eq!(m.values["x1"], Rational::new(1, 2));
        assert_eq!(m.values["x2"], Rational::from(-1));
    }

    #[test]
    fn command_parsing() {
        let c = SolverCommand::parse("  z3   -in -T:5 ").unwrap();
        assert_eq!(c.program, "z3");
        assert_eq!(c.args, ["-in", "-T:5"]);
        assert_eq!(c.to_string(), "z3 -in -T:5");
        assert!(SolverCommand::parse("   ").is_err());
        assert_eq!(SolverCommand::resolve(Some("cvc5 --lang smt2")).unwrap().program, "cvc5");
    }

    #[test]
    fn missing_binary() {
        let script = SmtScript { logic: "QF_NRA".into(), decls: vec![], assertions: vec![] };
        let cmd = SolverCommand::parse("definitely-not-a-solver-binary").unwrap();
        assert!(matches!(run_solver(&script, &cmd, 1000), Err(SmtError::Spawn { .. })));
    }
}
