//! Minimal s-expression reader for solver output.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(xs) => Some(xs),
            SExpr::Atom(_) => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => f.write_str(a),
            SExpr::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parse every top-level s-expression in `text`. Quoted `|symbols|` lose
/// their bars; string literals keep their quotes; `;` comments are skipped.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Vec::new();
    loop {
        skip_ws(&chars, &mut pos);
        if pos >= chars.len() {
            return Ok(out);
        }
        out.push(parse_one(&chars, &mut pos)?);
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() {
        if chars[*pos].is_whitespace() {
            *pos += 1;
        } else if chars[*pos] == ';' {
            while *pos < chars.len() && chars[*pos] != '\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

fn parse_one(chars: &[char], pos: &mut usize) -> Result<SExpr, String> {
    skip_ws(chars, pos);
    match chars.get(*pos) {
        None => Err("unexpected end of input".into()),
        Some(')') => Err(format!("unexpected `)` at offset {pos}")),
        Some('(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(chars, pos);
                match chars.get(*pos) {
                    None => return Err("unclosed `(`".into()),
                    Some(')') => {
                        *pos += 1;
                        return Ok(SExpr::List(items));
                    }
                    _ => items.push(parse_one(chars, pos)?),
                }
            }
        }
        Some('|') => {
            let start = *pos + 1;
            let end = chars[start..].iter().position(|&c| c == '|').ok_or("unclosed `|`")? + start;
            *pos = end + 1;
            Ok(SExpr::Atom(chars[start..end].iter().collect()))
        }
        Some('"') => {
            let start = *pos;
            *pos += 1;
            loop {
                match chars.get(*pos) {
                    None => return Err("unclosed string literal".into()),
                    Some('"') if chars.get(*pos + 1) == Some(&'"') => *pos += 2,
                    Some('"') => {
                        *pos += 1;
                        break;
                    }
                    _ => *pos += 1,
                }
            }
            Ok(SExpr::Atom(chars[start..*pos].iter().collect()))
        }
        Some(_) => {
            let start = *pos;
            while *pos < chars.len() && !chars[*pos].is_whitespace() && !matches!(chars[*pos], '(' | ')' | ';') {
                *pos += 1;
            }
            Ok(SExpr::Atom(chars[start..*pos].iter().collect()))
        }
    }
}
