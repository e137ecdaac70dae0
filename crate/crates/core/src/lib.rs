//! Lyapunov function synthesis by counterexample-guided inductive synthesis
//! over an external SMT-LIB2 solver.
//!
//! A [`ProblemFile`] yields one stability deficit per region, with
//! transcendental terms relaxed into polynomials over bounded error
//! variables. A verifier and a learner then alternate until the candidate
//! is proved or the loop gives up.

pub mod approx;
pub mod cegis;
pub mod expr;
pub mod formula;
pub mod problem;
pub mod rational;
pub mod smt;

pub use approx::{builtin_scheme, relax, ApproxError, ApproxOrders, ApproxScheme, EpsBound, Relaxation, Validity};
pub use cegis::{
    cegis, check_certificate, learn_candidate, run_cegis, stability_deficit, verify_candidate, ArtifactDir, Certificate,
    CertificateFile, CegisConfig, CegisError,
    CheckReport, CheckVerdict, Counterexample, Engine, LearnResult, Obligation, Outcome, Phase, RegionCheck, RegionVerdict,
    RunResult, SolverOptions, Trace, TraceEntry, TraceRegion,
};
pub use expr::{differentiate, eval_float, eval_rational, lie_derivative, parse_expr, parse_expr_with_params, Expr, FnKind, Point};
pub use formula::{CmpOp, Formula};
pub use problem::{load_problem, parse_problem, ParamValues, ProblemError, ProblemFile, SystemDef, Template, TimeKind};
pub use rational::Rational;
pub use smt::{emit, run_solver, SmtError, SmtScript, SolverCommand, SolverResult};
