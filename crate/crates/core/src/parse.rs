//! Text grammar for series, maps and vector fields.
//!
//! Scalars use `+ - * / ^`, parentheses, integer literals and the variables
//! `x, y, z` (up to three variables) or `z1 … zn`. Division needs a unit
//! denominator and is expanded up to the cutoff. A map is a parenthesized
//! tuple of scalars; a vector field is a sum of `(a)*d/dv` terms.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::{DiffeoJet, MultiIndex, TruncatedSeries};
use crate::Rational;

/// Cutoff used when a series is known to be a polynomial; high enough that
/// nothing realistic is ever truncated.
pub const POLYNOMIAL_CUTOFF: u32 = 1 << 16;

/// Display name of variable `i` (0-based) in an `n`-variable ring.
pub fn variable_name(nvars: usize, i: usize) -> String {
    if nvars <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("z{}", i + 1)
    }
}

fn variable_index(name: &str, nvars: usize) -> Option<usize> {
    if nvars <= 3 {
        if let Some(i) = ["x", "y", "z"].iter().position(|v| *v == name) {
            return (i < nvars).then_some(i);
        }
    }
    let digits = name.strip_prefix('z')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let i: usize = digits.parse().ok()?;
    (1..=nvars).contains(&i).then(|| i - 1)
}

/// Smallest variable count under which every variable in `text` is valid.
pub fn infer_nvars(text: &str) -> usize {
    let Ok(tokens) = tokenize(text) else { return 1 };
    let mut n = 1;
    for t in &tokens {
        if let Tok::Ident(name) = &t.tok {
            let name = match name.strip_prefix('d') {
                Some(rest) if !rest.is_empty() => rest,
                _ => name.as_str(),
            };
            let need = match name {
                "x" => 1,
                "y" => 2,
                "z" => 3,
                other => other
                    .strip_prefix('z')
                    .and_then(|d| d.parse::<usize>().ok())
                    .unwrap_or(1),
            };
            n = n.max(need);
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub(crate) tok: Tok,
    pub(crate) pos: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        let simple = match ch {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            chars.next();
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
        } else if ch.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                chars.next();
            }
            out.push(Token {
                tok: Tok::Num(s.parse().unwrap()),
                pos,
            });
        } else if ch.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !c.is_ascii_alphanumeric() {
                    break;
                }
                s.push(c);
                chars.next();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                pos,
            });
        } else {
            return Err(Error::parse(pos, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    nvars: usize,
    cutoff: u32,
    polynomial_only: bool,
}

impl Parser {
    pub(crate) fn new(text: &str, nvars: usize, cutoff: u32) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            end: text.len(),
            nvars,
            cutoff,
            polynomial_only: false,
        })
    }

    fn polynomial_only(mut self) -> Self {
        self.polynomial_only = true;
        self
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    pub(crate) fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.pos)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected {what}")))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Error::parse(self.offset(), "unexpected trailing input"))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<TruncatedSeries> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TruncatedSeries> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    // `*d/dv` closes a vector-field term; leave it to the caller
                    if matches!(self.peek_at(1), Some(Tok::Ident(s)) if s == "d")
                        && self.peek_at(2) == Some(&Tok::Slash)
                    {
                        return Ok(acc);
                    }
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    acc = &acc * &self.reciprocal(&d, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn reciprocal(&self, d: &TruncatedSeries, at: usize) -> Result<TruncatedSeries> {
        if self.polynomial_only && d.max_degree().is_some_and(|m| m > 0) {
            return Err(Error::parse(
                at,
                "polynomial input may only divide by constants",
            ));
        }
        d.inverse()
            .ok_or_else(|| Error::parse(at, "denominator is not a unit (zero constant term)"))
    }

    fn unary(&mut self) -> Result<TruncatedSeries> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<TruncatedSeries> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let e = match self.bump() {
            Some(Tok::Num(n)) => {
                u32::try_from(&n).map_err(|_| Error::parse(at, "exponent too large"))?
            }
            _ => return Err(Error::parse(at, "expected integer exponent")),
        };
        let base = if negative {
            self.reciprocal(&base, at)?
        } else {
            base
        };
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<TruncatedSeries> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(TruncatedSeries::constant(
                self.nvars,
                self.cutoff,
                Rational::from_integer(n),
            )),
            Some(Tok::Ident(name)) => match variable_index(&name, self.nvars) {
                Some(i) => Ok(TruncatedSeries::variable(self.nvars, self.cutoff, i)),
                None => Err(Error::parse(
                    at,
                    format!("unknown variable {name:?} for {} variables", self.nvars),
                )),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(_) => Err(Error::parse(at, "expected a number, variable or '('")),
            None => Err(Error::parse(at, "unexpected end of input")),
        }
    }

    /// Parses `d/dv` and returns the variable index.
    pub(crate) fn derivation(&mut self) -> Result<usize> {
        let at = self.offset();
        match (self.bump(), self.bump(), self.bump()) {
            (Some(Tok::Ident(d)), Some(Tok::Slash), Some(Tok::Ident(dv))) if d == "d" => {
                let name = dv.strip_prefix('d').unwrap_or("");
                variable_index(name, self.nvars)
                    .ok_or_else(|| Error::parse(at, format!("unknown derivation d/{dv}")))
            }
            _ => Err(Error::parse(at, "expected d/dv")),
        }
    }

    pub(crate) fn nvars(&self) -> usize {
        self.nvars
    }

    pub(crate) fn cutoff(&self) -> u32 {
        self.cutoff
    }
}

/// Parses a scalar expression as a series in `nvars` variables.
pub fn parse_series(text: &str, nvars: usize, cutoff: u32) -> Result<TruncatedSeries> {
    let mut p = Parser::new(text, nvars, cutoff)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a polynomial exactly; only constant denominators are accepted.
pub fn parse_polynomial(text: &str, nvars: usize) -> Result<TruncatedSeries> {
    let mut p = Parser::new(text, nvars, POLYNOMIAL_CUTOFF)?.polynomial_only();
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Number of components of a parenthesized tuple (top-level commas + 1).
fn tuple_arity(tokens: &[Token]) -> Option<usize> {
    if tokens.first().map(|t| &t.tok) != Some(&Tok::LParen) {
        return None;
    }
    let mut depth = 0i32;
    let mut commas = 0;
    for (i, t) in tokens.iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => {
                depth -= 1;
                if depth == 0 {
                    return (i == tokens.len() - 1).then_some(commas + 1);
                }
            }
            Tok::Comma if depth == 1 => commas += 1,
            _ => {}
        }
    }
    None
}

/// Parses a map `(f1, …, fn)`; the number of components fixes `n`.
pub fn parse_map(text: &str, cutoff: u32) -> Result<DiffeoJet> {
    let tokens = tokenize(text)?;
    let n = tuple_arity(&tokens)
        .ok_or_else(|| Error::parse(0, "a map is a parenthesized, comma-separated tuple"))?;
    let mut p = Parser::new(text, n, cutoff)?;
    p.expect(Tok::LParen, "'('")?;
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let at = p.offset();
        let c = p.expr()?;
        if !c.constant_term().is_zero() {
            return Err(Error::NotDiffeomorphism(format!(
                "component {} (offset {at}) has nonzero constant term",
                i + 1
            )));
        }
        comps.push(c);
        if i + 1 < n {
            p.expect(Tok::Comma, "','")?;
        }
    }
    p.expect(Tok::RParen, "')'")?;
    p.finish()?;
    DiffeoJet::new(comps)
}

pub fn print_map(phi: &DiffeoJet) -> String {
    phi.to_string()
}

pub(crate) fn write_monomial(f: &mut impl fmt::Write, m: &MultiIndex) -> fmt::Result {
    let n = m.nvars();
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(&variable_name(n, i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_constant() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for DiffeoJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Parses a rational literal like `3`, `-2/5` or `1/2`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = parse_series(text.trim(), 1, 1)?;
    if s.term_count() > 1 || s.order().is_some_and(|o| o > 0) {
        return Err(Error::parse(0, "expected a rational number"));
    }
    Ok(s.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_map_with_product() {
        let phi = parse_map("(x, y*(1+x))", 3).unwrap();
        assert_eq!(phi.component(1).term_count(), 2);
        assert_eq!(phi.to_string(), "(x, y + x*y)");
    }

    #[test]
    fn expands_geometric_denominator() {
        let phi = parse_map("(x/(1-x), y)", 3).unwrap();
        assert_eq!(phi.to_string(), "(x + x^2 + x^3, y)");
    }

    #[test]
    fn rejects_constant_term() {
        let err = parse_map("(x+1, y)", 3).unwrap_err();
        assert_eq!(err.code(), "NOT_DIFFEO");
    }

    #[test]
    fn rejects_singular_linear_part() {
        let err = parse_map("(x^2, y)", 3).unwrap_err();
        assert_eq!(err.code(), "NOT_DIFFEO");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_map("(x, y +* x)", 3).unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 7),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_series("x/y", 2, 3).unwrap_err(),
            Error::Parse { position: 2, .. }
        ));
        assert!(parse_series("w", 2, 3).is_err());
    }

    #[test]
    fn precedence_and_rationals() {
        let s = parse_series("-x^2 + 1/2*x*y - 3/4", 2, 4).unwrap();
        assert_eq!(s.constant_term(), q(-3, 4));
        assert_eq!(s.coeff(&MultiIndex::new(vec![2, 0])), q(-1, 1));
        assert_eq!(s.coeff(&MultiIndex::new(vec![1, 1])), q(1, 2));
        assert_eq!(s.to_string(), "-3/4 - x^2 + 1/2*x*y");
        assert_eq!(parse_series("2^3", 1, 1).unwrap().constant_term(), q(8, 1));
        assert_eq!(
            parse_series("(1+x)^-1", 1, 2).unwrap().to_string(),
            "1 - x + x^2"
        );
        assert_eq!(
            parse_series("x \u{2212} y", 2, 2).unwrap().to_string(),
            "x - y"
        );
    }

    #[test]
    fn many_variables_use_indexed_names() {
        let s = parse_series("z1*z4 + z2", 4, 3).unwrap();
        assert_eq!(s.to_string(), "z2 + z1*z4");
        assert_eq!(infer_nvars("z1*z4 + z2"), 4);
        assert_eq!(infer_nvars("x + z^3"), 3);
        assert_eq!(infer_nvars("y"), 2);
    }

    #[test]
    fn polynomial_parse_rejects_series_division() {
        assert!(parse_polynomial("x/(1-x)", 1).is_err());
        let p = parse_polynomial("x^40/2", 1).unwrap();
        assert_eq!(p.max_degree(), Some(40));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-2/5").unwrap(), q(-2, 5));
        assert!(parse_rational("x").is_err());
    }
}
