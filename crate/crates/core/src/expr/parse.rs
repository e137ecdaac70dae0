//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nonneg-int)?
//! atom   := rational | name | func '(' expr ')' | '(' expr ')'
//!         | '-' factor | '|' expr '|'
//! func   := exp | sin | arctan | abs
//! ```
//!
//! A leading minus negates the whole first term, so `-x^2` is `-(x^2)`.

use thiserror::Error;

use super::Expr;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown function `{name}` at {line}:{col}")]
    UnknownFunction { name: String, line: usize, col: usize },
    #[error("negative exponent at {line}:{col}")]
    NegativeExponent { line: usize, col: usize },
    #[error("fractional exponent at {line}:{col}")]
    FractionalExponent { line: usize, col: usize },
}

/// Parse with every name read as a state variable.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with_params::<&str>(text, &[])
}

/// Parse; names listed in `params` become [`Expr::Param`] leaves.
pub fn parse_expr_with_params<S: AsRef<str>>(text: &str, params: &[S]) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, chars: text.char_indices().collect(), pos: 0, params: params.iter().map(|s| s.as_ref()).collect() };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.chars[p.pos].1)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    params: Vec<&'a str>,
}

impl<'a> Parser<'a> {
    fn location(&self, pos: usize) -> (usize, usize) {
        let byte = self.chars.get(pos).map(|c| c.0).unwrap_or(self.src.len());
        let before = &self.src[..byte];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        (line, col)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.location(self.pos);
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(self.syntax(format!("expected `{c}`, found `{found}`"))),
                None => Err(self.syntax(format!("expected `{c}`, found end of input"))),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let first = if self.eat('-') { Expr::neg(self.term()?) } else { self.term()? };
        terms.push(first);
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.exponent()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let (line, col) = self.location(start);
        let parenthesized = self.eat('(');
        let negative = self.eat('-');
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.syntax("expected integer exponent"));
        }
        let fractional = self.peek() == Some('/') || self.peek() == Some('.');
        if negative {
            return Err(ParseError::NegativeExponent { line, col });
        }
        if fractional {
            return Err(ParseError::FractionalExponent { line, col });
        }
        if parenthesized {
            self.expect(')')?;
        }
        digits.parse().map_err(|_| self.syntax("exponent too large"))
    }

    fn digits(&mut self) -> String {
        self.skip_ws();
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('-') => {
                self.pos += 1;
                Ok(Expr::neg(self.factor()?))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('|') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect('|')?;
                Ok(Expr::abs(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits();
                let mut text = num;
                // `1/2` is a rational literal only when digits follow the slash.
                if self.chars.get(self.pos).map(|c| c.1) == Some('/') {
                    text.push('/');
                    self.pos += 1;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.syntax("expected denominator after `/`"));
                    }
                    if den.chars().all(|c| c == '0') {
                        return Err(self.syntax("zero denominator"));
                    }
                    text.push_str(&den);
                }
                let r: Rational = text.parse().map_err(|_| self.syntax("bad number"))?;
                Ok(Expr::Const(r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                let name = self.ident();
                if self.peek() == Some('(') {
                    let (line, col) = self.location(start);
                    let wrap: fn(Expr) -> Expr = match name.as_str() {
                        "exp" => |e| Expr::Exp(Box::new(e)),
                        "sin" => |e| Expr::Sin(Box::new(e)),
                        "arctan" => |e| Expr::Arctan(Box::new(e)),
                        "abs" => Expr::abs,
                        _ => return Err(ParseError::UnknownFunction { name, line, col }),
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(wrap(arg));
                }
                if self.params.contains(&name.as_str()) {
                    Ok(Expr::Param(name))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(c) => Err(self.syntax(format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn template_sum_of_products() {
        let e = parse_expr_with_params("p1*x1^2 + p2*x2^2", &["p1", "p2"]).unwrap();
        let expected = Expr::Sum(vec![
            Expr::Product(vec![Expr::param("p1"), Expr::pow(v("x1"), 2)]),
            Expr::Product(vec![Expr::param("p2"), Expr::pow(v("x2"), 2)]),
        ]);
        assert_eq!(e, expected);
    }

    #[test]
    fn subtraction_becomes_negated_summand() {
        let e = parse_expr("x^2 - exp(x) + 1").unwrap();
        let expected = Expr::Sum(vec![Expr::pow(v("x"), 2), Expr::neg(Expr::Exp(Box::new(v("x")))), Expr::int(1)]);
        assert_eq!(e, expected);
    }

    #[test]
    fn leading_minus_binds_looser_than_power() {
        assert_eq!(parse_expr("-x^2").unwrap(), Expr::neg(Expr::pow(v("x"), 2)));
        assert_eq!(parse_expr("(-x)^2").unwrap(), Expr::pow(Expr::neg(v("x")), 2));
    }

    #[test]
    fn abs_bars_and_function() {
        assert_eq!(parse_expr("|x1|").unwrap(), parse_expr("abs(x1)").unwrap());
        assert_eq!(parse_expr("|x|*|y|").unwrap(), Expr::Product(vec![Expr::abs(v("x")), Expr::abs(v("y"))]));
    }

    #[test]
    fn rational_literal() {
        assert_eq!(parse_expr("1/4*x").unwrap(), Expr::Product(vec![Expr::Const(Rational::new(1, 4)), v("x")]));
    }

    #[test]
    fn negative_exponent_is_rejected() {
        assert!(matches!(parse_expr("x1^(-1)"), Err(ParseError::NegativeExponent { .. })));
        assert!(matches!(parse_expr("x1^-1"), Err(ParseError::NegativeExponent { .. })));
    }

    #[test]
    fn fractional_exponent_is_rejected() {
        assert!(matches!(parse_expr("x^(1/2)"), Err(ParseError::FractionalExponent { .. })));
        assert!(matches!(parse_expr("x^1.5"), Err(ParseError::FractionalExponent { .. })));
    }

    #[test]
    fn unknown_function_is_reported() {
        assert!(matches!(parse_expr("cos(x)"), Err(ParseError::UnknownFunction { ref name, .. }) if name == "cos"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expr("x +\n  * y") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("(x").is_err());
        assert!(parse_expr("x y").is_err());
        assert!(parse_expr("").is_err());
        assert!(parse_expr("1/0").is_err());
    }
}
