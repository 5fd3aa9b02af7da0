//! Text form of polynomials: a small deterministic grammar, used both for
//! input files and for all printed output.
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | ident ('^' uint)? | '(' expr ')' ('^' uint)?
//! rational := uint ('/' uint)?
//! ident    := letter (letter | digit | '_')* '\''*
//! ```
//!
//! Printing emits this grammar with terms in descending degrevlex order, so
//! `parse(print(p)) == p` and printed output is canonical.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::vars::VarRegistry;
use crate::Rat;

struct Parser<'a> {
    reg: &'a Arc<VarRegistry>,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(reg: &'a Arc<VarRegistry>, src: &str) -> Self {
        Parser { reg, chars: src.chars().collect(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
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

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            Some(got) => Err(self.err(format!("expected `{c}`, found `{got}`"))),
            None => Err(self.err(format!("expected `{c}`, found end of input"))),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits
            .parse::<BigInt>()
            .map_err(|e| self.err(format!("bad integer literal: {e}")))
    }

    fn small_uint(&mut self) -> Result<u16> {
        let n = self.uint()?;
        u16::try_from(n.clone()).map_err(|_| self.err(format!("exponent {n} too large")))
    }

    fn rational(&mut self) -> Result<Rat> {
        let numer = self.uint()?;
        if self.peek() == Some('/') {
            self.bump();
            let denom = self.uint()?;
            if denom.is_zero() {
                return Err(self.err("zero denominator in rational literal"));
            }
            Ok(Rat::new(numer, denom))
        } else {
            Ok(Rat::from_integer(numer))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => self.pos += 1,
            _ => return Err(self.err("expected an identifier")),
        }
        while self
            .chars
            .get(self.pos)
            .map_or(false, |c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        while self.chars.get(self.pos) == Some(&'\'') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn factor(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let q = self.rational()?;
                Ok(Polynomial::constant(self.reg, q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.ident()?;
                let slot = self
                    .reg
                    .slot_of(&name)
                    .ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                let exp = self.maybe_power()?;
                let m = {
                    let mut e = vec![0u16; self.reg.n_slots()];
                    e[slot] = exp;
                    Monomial(e)
                };
                Ok(Polynomial::monomial(self.reg, m, Rat::one()))
            }
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                let exp = self.maybe_power()?;
                Ok(inner.pow(exp as u32))
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn maybe_power(&mut self) -> Result<u16> {
        if self.peek() == Some('^') {
            self.bump();
            self.small_uint()
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.bump();
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.peek() == Some('-') {
            self.bump();
            -&self.term()?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some('-') => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// Parses a single polynomial; the whole input must be consumed.
pub fn parse_polynomial(reg: &Arc<VarRegistry>, src: &str) -> Result<Polynomial> {
    let mut p = Parser::new(reg, src);
    let poly = p.expr()?;
    if !p.at_end() {
        return Err(p.err("trailing input after polynomial"));
    }
    Ok(poly)
}

/// Parses a parenthesized comma-separated vector: `(x, 3*y)`.
pub fn parse_vector(reg: &Arc<VarRegistry>, src: &str) -> Result<Vec<Polynomial>> {
    let mut p = Parser::new(reg, src);
    p.expect('(')?;
    let mut out = vec![p.expr()?];
    while p.peek() == Some(',') {
        p.bump();
        out.push(p.expr()?);
    }
    p.expect(')')?;
    if !p.at_end() {
        return Err(p.err("trailing input after vector"));
    }
    Ok(out)
}

fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn format_monomial(reg: &VarRegistry, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (slot, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(reg.name_of(slot).to_string()),
            _ => parts.push(format!("{}^{}", reg.name_of(slot), e)),
        }
    }
    parts.join("*")
}

/// Canonical text form; `impl Display for Polynomial` delegates here.
pub fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let reg = p.registry();
    let mut out = String::new();
    for (i, (m, c)) in p.terms_desc().enumerate() {
        let negative = c.is_negative();
        let abs = if negative { -c.clone() } else { c.clone() };
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mono = format_monomial(reg, m);
        if mono.is_empty() {
            out.push_str(&format_rat(&abs));
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format_rat(&abs));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_polynomial(self))
    }
}
