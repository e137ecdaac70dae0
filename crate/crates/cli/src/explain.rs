//! Human-readable account of what the solver will be asked, without asking.

use std::fmt::Write as _;

use lyapsyn_core::approx::ApproxScheme;
use lyapsyn_core::problem::Interval;
use lyapsyn_core::{CegisError, Engine, Expr, ProblemFile, TimeKind};

fn interval_text(var: &str, iv: &Interval) -> String {
    let mut s = String::new();
    if let Some(b) = &iv.lower {
        let _ = write!(s, "{} {} ", b.value, if b.strict { "<" } else { "<=" });
    }
    s.push_str(var);
    if let Some(b) = &iv.upper {
        let _ = write!(s, " {} {}", if b.strict { "<" } else { "<=" }, b.value);
    }
    s
}

fn validity_for(text: &str, var: &str) -> String {
    text.replace("|x|", &format!("|{var}|")).replace("all x", &format!("all {var}"))
}

/// Render the explanation. Parameters stay symbolic throughout.
pub fn explain(problem: &ProblemFile, engine: &Engine<'_>) -> Result<String, CegisError> {
    let mut out = String::new();
    let sys = &problem.system;
    let time = match sys.time {
        TimeKind::Continuous => "continuous",
        TimeKind::Discrete => "discrete",
    };
    let asym = engine.options().asymptotic;
    let _ = writeln!(out, "problem: {}", problem.name.as_deref().unwrap_or("(unnamed)"));
    let _ = writeln!(out, "  time: {time}");
    let _ = writeln!(out, "  state: {}", sys.state.join(", "));
    let _ = writeln!(out, "  params: {}", problem.params().join(", "));
    let _ = writeln!(out, "  template: V = {}", problem.template.candidate());
    let domain: Vec<String> = sys
        .state
        .iter()
        .map(|v| sys.domain.intervals.get(v).map_or_else(|| format!("{v} unbounded"), |iv| interval_text(v, iv)))
        .collect();
    let _ = writeln!(out, "  domain: {}", domain.join(", "));
    let _ = writeln!(out, "  decrease condition: deficit {} 0", if asym { "<" } else { "<=" });

    for ob in engine.obligations() {
        let region = &sys.regions[ob.region];
        let _ = writeln!(out);
        if region.guard.is_empty() {
            let _ = writeln!(out, "region {} (always active)", ob.region);
        } else {
            let guard: Vec<String> = region.guard.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "region {} where {}", ob.region, guard.join(" and "));
        }
        for (v, f) in sys.state.iter().zip(&region.dynamics) {
            let lhs = match sys.time {
                TimeKind::Continuous => format!("d{v}/dt"),
                TimeKind::Discrete => format!("{v}+"),
            };
            let _ = writeln!(out, "  {lhs} = {f}");
        }
        let _ = writeln!(out, "  deficit: {}", ob.raw_deficit);
        let _ = writeln!(out, "  relaxed deficit: {}", ob.deficit);
        for b in &ob.eps_bounds {
            let scheme = ApproxScheme::new(b.kind, b.order).with_tight_sin_bound(problem.approx.tight_sin_bound);
            let call = b.kind.apply(Expr::var(&b.var));
            let _ = writeln!(out, "  eps_{} = {call} - ({})", b.id, b.series);
            let _ = writeln!(
                out,
                "    |eps_{}| <= {}  (order {}, {} in [{}, {}], bound holds for {})",
                b.id,
                scheme.bound_text(&b.var),
                b.order,
                b.var,
                b.interval.0,
                b.interval.1,
                validity_for(&b.validity, &b.var)
            );
        }
        let _ = writeln!(out, "  verifier query (sat gives a counterexample):");
        for f in engine.symbolic_verifier_formulas(ob.region)? {
            let _ = writeln!(out, "    {f}");
        }
        let _ = writeln!(out, "  learner constraints per counterexample (x_ce, eps_ce) in this region:");
        let _ = writeln!(out, "    V(x_ce) > 0");
        let _ = writeln!(out, "    deficit(x_ce, eps_ce) {} 0", if asym { "<" } else { "<=" });
    }
    Ok(out)
}
