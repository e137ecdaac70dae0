use super::{Expr, ExprError};

/// `∂e/∂v`, simplified.
///
/// Only polynomial expressions are accepted; parameters and ε-variables are
/// constants with respect to `v`.
pub fn differentiate(e: &Expr, v: &str) -> Result<Expr, ExprError> {
    Ok(raw_derivative(e, v)?.simplify())
}

fn raw_derivative(e: &Expr, v: &str) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Var(n) if n == v => Expr::one(),
        Expr::Var(_) | Expr::Param(_) | Expr::Eps(_) | Expr::Const(_) => Expr::zero(),
        Expr::Sum(cs) => Expr::sum(cs.iter().map(|c| raw_derivative(c, v)).collect::<Result<_, _>>()?),
        Expr::Product(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for (i, c) in cs.iter().enumerate() {
                let dc = raw_derivative(c, v)?;
                if dc.is_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
                factors.push(dc);
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Expr::Pow(b, n) => match n {
            0 => Expr::zero(),
            _ => Expr::product(vec![Expr::int(i64::from(*n)), Expr::pow((**b).clone(), n - 1), raw_derivative(b, v)?]),
        },
        Expr::Neg(c) => Expr::neg(raw_derivative(c, v)?),
        Expr::Abs(_) | Expr::Exp(_) | Expr::Sin(_) | Expr::Arctan(_) => {
            return Err(ExprError::NonPolynomial(e.to_string()));
        }
    })
}

/// Lie derivative `Σᵢ (∂V/∂xᵢ)·fᵢ` of `v` along the vector field `field`.
pub fn lie_derivative<S: AsRef<str>>(v: &Expr, vars: &[S], field: &[Expr]) -> Result<Expr, ExprError> {
    if vars.len() != field.len() {
        return Err(ExprError::DimensionMismatch { vars: vars.len(), fields: field.len() });
    }
    let mut terms = Vec::with_capacity(vars.len());
    for (x, f) in vars.iter().zip(field) {
        let dv = differentiate(v, x.as_ref())?;
        if !dv.is_zero() {
            terms.push(Expr::product(vec![dv, f.clone()]));
        }
    }
    Ok(Expr::sum(terms).simplify())
}
