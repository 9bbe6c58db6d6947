//! Human-readable rendering and parsing.
//!
//! Series print as `2 - v1 ξ + 2 v1^2 ξ^2 + (-8 v1^3 - 7 v2) ξ^3 + O(ξ)^14`.
//! The parser reads that back, and also accepts `xi` for `ξ`, `*` between
//! factors and `O(ξ^14)`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::series::{raw_product, Exponent, TruncatedSeries, EXACT};
use super::{Basis, GradedPolynomial, Monomial, Rational};
use crate::error::{Error, Result};

fn write_monomial(out: &mut String, basis: Basis, m: &Monomial) {
    let mut first = true;
    for (g, e) in m.factors() {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{}{}", basis.symbol(), g);
        if e != 1 {
            let _ = write!(out, "^{}", e);
        }
    }
}

fn write_var(out: &mut String, name: &str, e: u32) {
    if e == 0 {
        return;
    }
    if !out.is_empty() {
        out.push(' ');
    }
    out.push_str(name);
    if e != 1 {
        let _ = write!(out, "^{}", e);
    }
}

/// One signed term `c m`, returned as (is_negative, magnitude text).
fn term_text(basis: Basis, m: &Monomial, c: &Rational, suffix: &str) -> (bool, String) {
    let neg = c.is_negative();
    let a = c.abs();
    let mut s = String::new();
    let unit = m.is_one() && suffix.is_empty();
    if !a.is_one() || unit {
        let _ = write!(s, "{}", a);
    }
    if !m.is_one() {
        if !s.is_empty() {
            s.push(' ');
        }
        write_monomial(&mut s, basis, m);
    }
    if !suffix.is_empty() {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(suffix);
    }
    (neg, s)
}

fn join_terms(terms: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (i, (neg, t)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => out.push_str(&t),
            (0, true) => {
                out.push('-');
                out.push_str(&t);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&t);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&t);
            }
        }
    }
    out
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let basis = self.basis();
        f.write_str(&join_terms(
            self.terms().map(|(m, c)| term_text(basis, m, &c, "")),
        ))
    }
}

fn exponent_suffix(e: Exponent) -> String {
    let mut s = String::new();
    write_var(&mut s, "ξ", e.0);
    write_var(&mut s, "x", e.1);
    s
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = self.basis();
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (e, c) in self.terms() {
            let suffix = exponent_suffix(e);
            if c.len() == 1 {
                let (m, r) = c.terms().next().expect("one term");
                parts.push(term_text(basis, m, &r, &suffix));
            } else if suffix.is_empty() {
                parts.push((false, format!("({})", c)));
            } else {
                parts.push((false, format!("({}) {}", c, suffix)));
            }
        }
        if parts.is_empty() {
            parts.push((false, "0".to_string()));
        }
        let bivariate = !self.is_univariate() || self.x_limit() != EXACT;
        if self.validity() != EXACT {
            let o = if bivariate {
                format!("O(ξ, x)^{}", self.validity())
            } else {
                format!("O(ξ)^{}", self.validity())
            };
            parts.push((false, o));
        }
        if self.x_limit() != EXACT {
            parts.push((false, format!("O(x)^{}", self.x_limit())));
        }
        f.write_str(&join_terms(parts))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Slash,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    Gen(char, usize),
    Xi,
    X,
    Big,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let d = digits(&mut i);
                out.push(Tok::Num(d.parse().expect("digits")));
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1
            }
            'ξ' => {
                out.push(Tok::Xi);
                i += 1
            }
            'O' => {
                out.push(Tok::Big);
                i += 1
            }
            'x' => {
                if chars.get(i + 1) == Some(&'i') {
                    out.push(Tok::Xi);
                    i += 2;
                } else {
                    out.push(Tok::X);
                    i += 1;
                }
            }
            'v' | 'l' => {
                i += 1;
                let d = digits(&mut i);
                let m: usize = d
                    .parse()
                    .map_err(|_| Error::Parse(format!("generator '{}' needs an index", c)))?;
                if m == 0 {
                    return Err(Error::Parse(format!("{}0 is not a generator", c)));
                }
                out.push(Tok::Gen(c, m));
            }
            other => return Err(Error::Parse(format!("unexpected character '{}'", other))),
        }
    }
    Ok(out)
}

type Bivariate = BTreeMap<Exponent, GradedPolynomial>;

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    basis: Basis,
    validity: u32,
    x_limit: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {:?}, found {:?}", t, got))),
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(n)) => {
                    u32::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))
                }
                t => Err(Error::Parse(format!("expected exponent, found {:?}", t))),
            }
        } else {
            Ok(1)
        }
    }

    fn unit(&self) -> Bivariate {
        BTreeMap::from([((0, 0), GradedPolynomial::one(self.basis))])
    }

    fn mul(&self, a: &Bivariate, b: &Bivariate) -> Bivariate {
        raw_product(a, b, EXACT, EXACT, self.basis)
    }

    fn sum(&mut self, top: bool) -> Result<Bivariate> {
        let mut acc: Bivariate = BTreeMap::new();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    false
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            if top && self.peek() == Some(&Tok::Big) {
                self.pos += 1;
                self.big_o()?;
                continue;
            }
            let mut term = self.product()?;
            if neg {
                for c in term.values_mut() {
                    *c = -&*c;
                }
            }
            for (e, c) in term {
                let slot = acc
                    .entry(e)
                    .or_insert_with(|| GradedPolynomial::zero(self.basis));
                *slot = &*slot + &c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    fn product(&mut self) -> Result<Bivariate> {
        let mut acc = self.unit();
        let mut any = false;
        loop {
            let factor = match self.peek() {
                Some(Tok::Star) if any => {
                    self.pos += 1;
                    continue;
                }
                Some(Tok::Num(_)) => {
                    let Some(Tok::Num(n)) = self.next() else {
                        unreachable!()
                    };
                    let mut r = Rational::from_integer(n);
                    if self.peek() == Some(&Tok::Slash) {
                        self.pos += 1;
                        match self.next() {
                            Some(Tok::Num(d)) if !d.is_zero() => r /= Rational::from_integer(d),
                            t => return Err(Error::Parse(format!("bad denominator {:?}", t))),
                        }
                    }
                    BTreeMap::from([((0, 0), GradedPolynomial::constant(self.basis, r))])
                }
                Some(Tok::Gen(c, m)) => {
                    let (c, m) = (*c, *m);
                    self.pos += 1;
                    if c.to_string() != self.basis.symbol() {
                        return Err(Error::WrongBasis {
                            expected: self.basis,
                        });
                    }
                    let e = self.exponent()?;
                    let poly = GradedPolynomial::monomial(
                        self.basis,
                        Monomial::generator_pow(m, e),
                        Rational::one(),
                    );
                    BTreeMap::from([((0, 0), poly)])
                }
                Some(Tok::Xi) => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    BTreeMap::from([((e, 0), GradedPolynomial::one(self.basis))])
                }
                Some(Tok::X) => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    BTreeMap::from([((0, e), GradedPolynomial::one(self.basis))])
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let inner = self.sum(false)?;
                    self.expect(Tok::RParen)?;
                    let e = self.exponent()?;
                    let mut p = self.unit();
                    for _ in 0..e {
                        p = self.mul(&p, &inner);
                    }
                    p
                }
                _ => break,
            };
            acc = self.mul(&acc, &factor);
            any = true;
        }
        if !any {
            return Err(Error::Parse(format!(
                "expected a term at token {}, found {:?}",
                self.pos,
                self.peek()
            )));
        }
        Ok(acc)
    }

    /// `O(ξ)^n`, `O(ξ^n)`, `O(ξ, x)^n`, `O((ξ, x)^n)`, `O(x)^n`, `O(x^n)`.
    fn big_o(&mut self) -> Result<()> {
        self.expect(Tok::LParen)?;
        let nested = self.peek() == Some(&Tok::LParen);
        if nested {
            self.pos += 1;
        }
        let mut has_xi = false;
        let mut vars = 0;
        let mut inner = 1;
        loop {
            match self.next() {
                Some(Tok::Xi) => has_xi = true,
                Some(Tok::X) => {}
                t => return Err(Error::Parse(format!("malformed O-term at {:?}", t))),
            }
            vars += 1;
            if self.peek() == Some(&Tok::Caret) {
                inner = self.exponent()?;
            }
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                continue;
            }
            break;
        }
        self.expect(Tok::RParen)?;
        if nested {
            inner = self.exponent()?;
            self.expect(Tok::RParen)?;
        }
        if vars > 1 && inner != 1 && !nested {
            return Err(Error::Parse("ambiguous O-term".into()));
        }
        let outer = self.exponent()?;
        let n = inner
            .checked_mul(outer)
            .ok_or_else(|| Error::Parse("O-term exponent too large".into()))?;
        if has_xi {
            self.validity = self.validity.min(n);
        } else {
            self.x_limit = self.x_limit.min(n);
        }
        Ok(())
    }
}

/// Parses a polynomial such as `-8 v1^3 - 7 v2` in the given basis.
pub fn parse_polynomial(s: &str, basis: Basis) -> Result<GradedPolynomial> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        basis,
        validity: EXACT,
        x_limit: EXACT,
    };
    let b = p.sum(false)?;
    if p.pos < p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    if b.keys().any(|e| *e != (0, 0)) {
        return Err(Error::Parse("polynomial may not contain ξ or x".into()));
    }
    Ok(b.get(&(0, 0))
        .cloned()
        .unwrap_or_else(|| GradedPolynomial::zero(basis)))
}

/// Parses a series as printed by its `Display` implementation.
pub fn parse_series(s: &str, prime: u32, basis: Basis) -> Result<TruncatedSeries> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        basis,
        validity: EXACT,
        x_limit: EXACT,
    };
    let b = p.sum(true)?;
    if p.pos < p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    let s = TruncatedSeries::from_terms(prime, basis, p.validity, b)?;
    Ok(if p.x_limit == EXACT {
        s
    } else {
        s.with_x_limit(p.x_limit)
    })
}

impl std::str::FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v" | "V" => Ok(Basis::V),
            "l" | "L" => Ok(Basis::L),
            _ => Err(Error::Parse(format!("unknown basis '{}'", s))),
        }
    }
}
