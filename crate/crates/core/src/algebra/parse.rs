//! Text formats for algebras and polynomials.
//!
//! ```text
//! algebra cusp
//! vars x:2 y:3
//! rel y^2 - x^3
//! ```
//!
//! `;` separates statements like a newline, `#` starts a comment, `rels:` is
//! accepted as an empty header. Coefficients may be integers or fractions,
//! `*` is optional and parentheses group.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// One statement of a presentation, with its source position.
#[derive(Clone, Debug)]
pub(crate) struct Statement {
    pub line: usize,
    pub column: usize,
    pub keyword: String,
    pub rest: String,
    pub rest_column: usize,
}

/// Split a file into statements, dropping comments and blank lines.
pub(crate) fn statements(text: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut col = 0usize;
        for piece in line.split(';') {
            let start = col;
            col += piece.chars().count() + 1;
            let trimmed = piece.trim_start();
            let lead = piece.chars().count() - trimmed.chars().count();
            let trimmed = trimmed.trim_end();
            if trimmed.is_empty() {
                continue;
            }
            let (kw, rest) = match trimmed.find(char::is_whitespace) {
                Some(p) => (&trimmed[..p], &trimmed[p..]),
                None => (trimmed, ""),
            };
            let rest_trim = rest.trim_start();
            let rest_col =
                start + lead + kw.chars().count() + (rest.chars().count() - rest_trim.chars().count());
            out.push(Statement {
                line: ln + 1,
                column: start + lead + 1,
                keyword: kw.to_string(),
                rest: rest_trim.to_string(),
                rest_column: rest_col + 1,
            });
        }
    }
    out
}

/// Parse `sym:weight ...`.
pub(crate) fn parse_vars(st: &Statement) -> Result<Vec<(String, i64)>> {
    let mut out = Vec::new();
    let mut col = st.rest_column;
    for tok in st.rest.split_whitespace() {
        let off = st.rest[col - st.rest_column..]
            .find(tok)
            .map_or(0, |p| p);
        let here = col + off;
        let (sym, w) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(st.line, here, format!("expected `symbol:weight`, found `{tok}`")))?;
        if !is_identifier(sym) {
            return Err(Error::parse(st.line, here, format!("invalid generator name `{sym}`")));
        }
        let w: i64 = w
            .parse()
            .map_err(|_| Error::parse(st.line, here + sym.len() + 1, format!("invalid weight `{w}`")))?;
        if out.iter().any(|(s, _): &(String, i64)| s == sym) {
            return Err(Error::parse(st.line, here, format!("duplicate generator `{sym}`")));
        }
        out.push((sym.to_string(), w));
        col = here + tok.len();
    }
    Ok(out)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parser for polynomial expressions over given generator names.
pub(crate) struct PolyParser<'a> {
    names: &'a [String],
    weights: &'a [u32],
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> PolyParser<'a> {
    pub fn new(names: &'a [String], weights: &'a [u32], text: &str, line: usize, col0: usize) -> Self {
        PolyParser {
            names,
            weights,
            chars: text.chars().collect(),
            pos: 0,
            line,
            col0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col0 + self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    pub fn parse_all(mut self) -> Result<Poly> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err(format!("unexpected `{}`", self.chars[self.pos])));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly> {
        let n = self.names.len();
        let mut acc = Poly::zero(n);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            let t = self.product()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
            first = false;
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = acc.mul(&f);
                }
                Some(c) if c == '(' || c.is_ascii_alphanumeric() || c == '_' => {
                    let f = self.power()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a non-negative integer exponent"));
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            let e: u32 = s.parse().map_err(|_| self.err("exponent too large"))?;
            if e > 1000 {
                return Err(self.err("exponent too large"));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let n = self.names.len();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer();
                let mut q = Rational::from_integer(num);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    if !self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        return Err(self.err("expected a denominator"));
                    }
                    let den = self.integer();
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    q /= Rational::from_integer(den);
                }
                Ok(Poly::constant(n, q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                let mut end = start;
                while end < self.chars.len() && (self.chars[end].is_ascii_alphanumeric() || self.chars[end] == '_') {
                    end += 1;
                }
                let word: String = self.chars[start..end].iter().collect();
                // Juxtaposed names such as `xy` are split greedily; only the
                // first name is consumed here so `^` binds to the last one.
                let best = self
                    .names
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| word.starts_with(s.as_str()))
                    .max_by_key(|(_, s)| s.len());
                let Some((i, s)) = best else {
                    return Err(self.err(format!("unknown generator `{word}`")));
                };
                self.pos = start + s.chars().count();
                Ok(Poly::term(Monomial::var(i, self.weights), Rational::one()))
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn integer(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().unwrap_or_else(|_| BigInt::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statements_split_on_semicolons() {
        let st = statements("vars x:2 y:3; rel y^2 - x^3 # cusp\n\n  rels:");
        assert_eq!(st.len(), 3);
        assert_eq!(st[0].keyword, "vars");
        assert_eq!(st[1].keyword, "rel");
        assert_eq!(st[1].rest, "y^2 - x^3");
        assert_eq!(st[2].line, 3);
    }

    #[test]
    fn polynomial_syntax() {
        let names = vec!["x".to_string(), "y".to_string(), "x1".to_string()];
        let w = [1, 1, 2];
        let p = PolyParser::new(&names, &w, "3/2 xy^2 - (x - y)^2 + 2*x1", 1, 1)
            .parse_all()
            .unwrap();
        let q = PolyParser::new(&names, &w, "3/2*x*y^2 - x^2 + 2*x*y - y^2 + 2*x1", 1, 1)
            .parse_all()
            .unwrap();
        assert_eq!(p, q);
        let bad = PolyParser::new(&names, &w, "x + q", 4, 5).parse_all();
        match bad {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(column, 9);
            }
            other => panic!("{other:?}"),
        }
    }
}
