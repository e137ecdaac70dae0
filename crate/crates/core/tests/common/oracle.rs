//! Independent checks on synthesis results. Shared by the core run tests and
//! the acceptance suite.
//!
//! Nothing here goes through the engine's obligations: deficits are derived
//! again from the problem's true dynamics and evaluated with the real
//! transcendental functions.

#![allow(dead_code)]

use std::path::PathBuf;

use lyapsyn_core::expr::FloatPoint;
use lyapsyn_core::{
    eval_float, eval_rational, lie_derivative, load_problem, Counterexample, Engine, Expr, ParamValues, Point, ProblemFile,
    Rational, TimeKind, Trace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../cli/examples")).join(name)
}

pub fn example(name: &str) -> ProblemFile {
    load_problem(example_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `V̇` or `V(f(x)) - V(x)` for concrete parameters, transcendentals intact.
pub fn true_deficit(problem: &ProblemFile, region: usize, params: &ParamValues) -> Expr {
    let v = problem.template.instantiate(params).unwrap();
    let sys = &problem.system;
    let dynamics = &sys.regions[region].dynamics;
    match sys.time {
        TimeKind::Continuous => lie_derivative(&v, &sys.state, dynamics).unwrap(),
        TimeKind::Discrete => {
            let next = sys.state.iter().cloned().zip(dynamics.iter().cloned()).collect();
            Expr::sub(v.substitute(&next), v).simplify()
        }
    }
}

/// The solver's counterexample really satisfies the verifier query for the
/// candidate it refuted, checked with exact rationals.
pub fn counterexample_is_exact(engine: &Engine<'_>, params: &ParamValues, cex: &Counterexample) -> Result<(), String> {
    let pt = cex.as_point();
    for f in engine.verifier_formulas(cex.region, params).map_err(|e| e.to_string())? {
        if !f.holds(&pt).map_err(|e| e.to_string())? {
            return Err(format!("{cex} does not satisfy `{f}`"));
        }
    }
    Ok(())
}

/// `params` meets every learner constraint of every counterexample exactly,
/// and the positivity half is confirmed on the instantiated template.
pub fn learner_model_is_consistent(engine: &Engine<'_>, params: &ParamValues, cexs: &[Counterexample]) -> Result<(), String> {
    let problem = engine.problem();
    let v = problem.template.instantiate(params).map_err(|e| e.to_string())?;
    let at_params = Point { values: params.clone(), eps: Default::default() };
    for cex in cexs {
        let value = eval_rational(&v, &cex.as_point()).map_err(|e| e.to_string())?;
        if value <= Rational::zero() {
            return Err(format!("V({cex}) = {value} is not positive"));
        }
        for f in engine.learner_constraints(cex) {
            if !f.holds(&at_params).map_err(|e| e.to_string())? {
                return Err(format!("{cex}: learner constraint `{f}` fails"));
            }
        }
    }
    Ok(())
}

/// Replay a trace: every counterexample is exact for the candidate of its
/// entry, and each later candidate satisfies the counterexamples retained
/// at the time it was learned.
pub fn trace_is_sound(engine: &Engine<'_>, trace: &Trace) -> Result<usize, String> {
    let window = trace.window as usize;
    let mut cexs: Vec<Counterexample> = Vec::new();
    let mut checked = 0;
    for pair in trace.entries.windows(2).map(|w| (&w[0], Some(&w[1]))).chain(trace.entries.last().map(|e| (e, None))) {
        let (entry, next) = pair;
        let Some(cex) = &entry.counterexample else { continue };
        counterexample_is_exact(engine, &entry.candidate, cex).map_err(|e| format!("iteration {}: {e}", entry.iteration))?;
        cexs.push(cex.clone());
        checked += 1;
        if let Some(next) = next {
            let retained = if window == 0 || cexs.len() <= window { &cexs[..] } else { &cexs[cexs.len() - window..] };
            learner_model_is_consistent(engine, &next.candidate, retained)
                .map_err(|e| format!("candidate of iteration {}: {e}", next.iteration))?;
        }
    }
    Ok(checked)
}

fn sample_coordinate(problem: &ProblemFile, var: &str, rng: &mut ChaCha8Rng) -> Rational {
    let (lo, hi) = problem.system.domain.closure(var).map_or((-10_000, 10_000), |(lo, hi)| {
        ((lo.to_f64() * 1000.0).ceil() as i64 + 1, (hi.to_f64() * 1000.0).floor() as i64 - 1)
    });
    Rational::new(rng.gen_range(lo..=hi), 1000)
}

/// Sample `n` nonzero points of the domain. At each, `V > 0` exactly and the
/// true deficit of every active region is `<= tol` in floating point.
pub fn spot_check(problem: &ProblemFile, params: &ParamValues, n: usize, seed: u64, tol: f64) -> Result<(), String> {
    let v = problem.template.instantiate(params).map_err(|e| e.to_string())?;
    let deficits: Vec<Expr> = (0..problem.system.regions.len()).map(|r| true_deficit(problem, r, params)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < n {
        let pt = Point::from_pairs(problem.state().iter().map(|x| (x.clone(), sample_coordinate(problem, x, &mut rng))));
        if pt.values.values().all(Rational::is_zero) {
            continue;
        }
        let value = eval_rational(&v, &pt).map_err(|e| e.to_string())?;
        if value <= Rational::zero() {
            return Err(format!("V = {value} at {pt:?}"));
        }
        let mut fp = FloatPoint::default();
        for (k, x) in &pt.values {
            fp.set(k.clone(), x.to_f64());
        }
        for (r, region) in problem.system.regions.iter().enumerate() {
            let active = region.guard_formulas().iter().all(|g| g.holds(&pt).unwrap());
            if !active {
                continue;
            }
            let d = eval_float(&deficits[r], &fp).map_err(|e| e.to_string())?;
            if d > tol {
                return Err(format!("region {r}: deficit {d:e} at {pt:?}"));
            }
        }
        done += 1;
    }
    Ok(())
}
