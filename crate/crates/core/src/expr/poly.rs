//! Sparse multivariate polynomials used to canonicalize expressions.
//!
//! Non-polynomial subterms (`abs`, `exp`, `sin`, `arctan`) are treated as
//! opaque atoms whose arguments are themselves canonicalized.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use super::Expr;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Param(String),
    Var(String),
    Eps(u32),
    Opaque(Expr),
}

impl Atom {
    fn to_expr(&self) -> Expr {
        match self {
            Atom::Param(n) => Expr::Param(n.clone()),
            Atom::Var(n) => Expr::Var(n.clone()),
            Atom::Eps(id) => Expr::Eps(*id),
            Atom::Opaque(e) => e.clone(),
        }
    }
}

/// Sorted by atom, all degrees positive.
type Monomial = Vec<(Atom, u32)>;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    fn constant(c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    fn atom(a: Atom) -> Poly {
        let mut p = Poly::default();
        p.terms.insert(vec![(a, 1)], Rational::one());
        p
    }

    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn add(mut self, other: &Poly) -> Poly {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
        self
    }

    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }

    fn scale(mut self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        for c in self.terms.values_mut() {
            *c = &*c * k;
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = mul_monomials(ma, mb);
                let c = ca * cb;
                match reduce_abs_powers(&m) {
                    None => out.add_term(m, c),
                    Some(expanded) => out = out.add(&expanded.scale(&c)),
                }
            }
        }
        out
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn from_expr(e: &Expr) -> Poly {
        match e {
            Expr::Param(n) => Poly::atom(Atom::Param(n.clone())),
            Expr::Var(n) => Poly::atom(Atom::Var(n.clone())),
            Expr::Eps(id) => Poly::atom(Atom::Eps(*id)),
            Expr::Const(r) => Poly::constant(r.clone()),
            Expr::Sum(cs) => cs.iter().fold(Poly::default(), |acc, c| acc.add(&Poly::from_expr(c))),
            Expr::Product(cs) => cs.iter().fold(Poly::constant(Rational::one()), |acc, c| acc.mul(&Poly::from_expr(c))),
            Expr::Pow(b, n) => Poly::from_expr(b).pow(*n),
            Expr::Neg(c) => Poly::from_expr(c).neg(),
            Expr::Abs(c) => abs_of(Poly::from_expr(c)),
            Expr::Exp(c) => {
                let inner = Poly::from_expr(c);
                match inner.as_constant() {
                    Some(k) if k.is_zero() => Poly::constant(Rational::one()),
                    _ => Poly::atom(Atom::Opaque(Expr::Exp(Box::new(inner.to_expr())))),
                }
            }
            Expr::Sin(c) => odd_fn(Poly::from_expr(c), |e| Expr::Sin(Box::new(e))),
            Expr::Arctan(c) => odd_fn(Poly::from_expr(c), |e| Expr::Arctan(Box::new(e))),
        }
    }

    fn ordered_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| canonical_order(a.0, b.0));
        v
    }

    pub(crate) fn to_expr(&self) -> Expr {
        let terms: Vec<Expr> = self.ordered_terms().into_iter().map(|(m, c)| term_expr(m, c)).collect();
        Expr::sum(terms)
    }
}

fn odd_fn(inner: Poly, wrap: fn(Expr) -> Expr) -> Poly {
    match inner.as_constant() {
        Some(k) if k.is_zero() => Poly::default(),
        _ => Poly::atom(Atom::Opaque(wrap(inner.to_expr()))),
    }
}

/// `|p|` with constants folded, the sign normalized so the leading term is
/// positive, and a scalar factor pulled out of single-term arguments.
fn abs_of(p: Poly) -> Poly {
    if let Some(k) = p.as_constant() {
        return Poly::constant(k.abs());
    }
    let leading_negative = p.ordered_terms().first().map(|(_, c)| c.is_negative()).unwrap_or(false);
    let p = if leading_negative { p.neg() } else { p };
    if p.terms.len() == 1 {
        let (m, c) = p.terms.iter().next().unwrap();
        let unit = term_expr(m, &Rational::one());
        return Poly::atom(Atom::Opaque(Expr::abs(unit))).scale(c);
    }
    Poly::atom(Atom::Opaque(Expr::abs(p.to_expr())))
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `|q|^(2k+r) = q^(2k) * |q|^r`. Returns `None` when the monomial has no
/// `abs` atom of degree two or more.
fn reduce_abs_powers(m: &Monomial) -> Option<Poly> {
    let pos = m.iter().position(|(a, d)| *d >= 2 && matches!(a, Atom::Opaque(Expr::Abs(_))))?;
    let (atom, deg) = &m[pos];
    let Atom::Opaque(Expr::Abs(inner)) = atom else { unreachable!() };
    let mut rest: Monomial = m.clone();
    if deg % 2 == 1 {
        rest[pos].1 = 1;
    } else {
        rest.remove(pos);
    }
    Some(Poly::from_expr(inner).pow(deg - deg % 2).mul(&monomial_poly(rest)))
}

fn monomial_poly(m: Monomial) -> Poly {
    let mut p = Poly::default();
    p.terms.insert(m, Rational::one());
    p
}

/// Lexicographic by symbol; on equal symbols the higher degree comes
/// first; a monomial that is a prefix of another comes after it, so the
/// constant term is always last.
fn canonical_order(a: &Monomial, b: &Monomial) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.0.cmp(&y.0) {
            Ordering::Equal => match y.1.cmp(&x.1) {
                Ordering::Equal => continue,
                other => return other,
            },
            other => return other,
        }
    }
    b.len().cmp(&a.len())
}

fn term_expr(m: &Monomial, c: &Rational) -> Expr {
    let mut factors: Vec<Expr> = Vec::with_capacity(m.len() + 1);
    let magnitude = c.abs();
    if !magnitude.is_one() || m.is_empty() {
        factors.push(Expr::Const(magnitude));
    }
    for (a, d) in m {
        let base = a.to_expr();
        factors.push(if *d == 1 { base } else { Expr::pow(base, *d) });
    }
    let body = Expr::product(factors);
    if c.is_negative() {
        Expr::neg(body)
    } else {
        body
    }
}
