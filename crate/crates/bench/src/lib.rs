//! Fixtures for the benchmarks: the bundled problems and scalable inputs.

use lyapsyn_core::{parse_expr, parse_problem, Expr, ProblemFile};

pub const BUNDLED: [(&str, &str); 5] = [
    ("linear", include_str!("../../cli/examples/va.json")),
    ("scalar_exp", include_str!("../../cli/examples/vb_n3.json")),
    ("trigonometric", include_str!("../../cli/examples/vc.json")),
    ("switched", include_str!("../../cli/examples/vd.json")),
    ("discrete_arctan", include_str!("../../cli/examples/ve.json")),
];

pub fn bundled() -> Vec<(&'static str, ProblemFile)> {
    BUNDLED.iter().map(|(name, text)| (*name, parse_problem(text).expect("bundled problem parses"))).collect()
}

/// Text of a dense polynomial in `x1, x2` of total degree `degree`.
pub fn dense_poly_text(degree: u32) -> String {
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            let c = (i * 7 + j * 3) % 11 + 1;
            let sign = if (i + j) % 2 == 0 { "" } else { "-" };
            terms.push(format!("{sign}{c}/{}*x1^{i}*x2^{j}", j + 1));
        }
    }
    terms.join(" + ")
}

/// `(x1 + 1/2*x2 - 1/3)^n`, unexpanded.
pub fn power_of_sum(n: u32) -> Expr {
    parse_expr(&format!("(x1 + 1/2*x2 - 1/3)^{n}")).expect("fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(bundled().len(), BUNDLED.len());
        assert!(parse_expr(&dense_poly_text(6)).is_ok());
        assert_eq!(power_of_sum(3).simplify().free_vars().len(), 2);
    }
}
