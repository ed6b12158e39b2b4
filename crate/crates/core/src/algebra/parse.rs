//! Expression grammar and canonical serialisation.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' ['-'] integer)*
//! atom   := rational | name | 'pd(' name ')' | 'dd(' name ')' | '(' expr ')'
//! ```
//!
//! `hbar` is a reserved central degree-0 variable; `parse_series` keeps track of
//! its exponent, `parse` rejects it.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use super::poly::{Monomial, Poly, Q};
use super::signature::Signature;

/// Laurent series in `hbar`: exponent to coefficient polynomial.
pub type Series = BTreeMap<i64, Poly>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Arc<Signature>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, (String, usize)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(src[s..i].parse().unwrap()), s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(src[s..i].to_string()), s));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err((format!("unexpected character `{c}`"), i));
        }
    }
    Ok(out)
}

fn location(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

fn series_add(a: &mut Series, b: &Series, sign: bool) {
    for (k, p) in b {
        let e = a.remove(k);
        let r = match e {
            Some(x) => {
                if sign {
                    x + p
                } else {
                    x - p
                }
            }
            None => {
                if sign {
                    p.clone()
                } else {
                    -p
                }
            }
        };
        if !r.is_zero() {
            a.insert(*k, r);
        }
    }
}

fn series_mul(a: &Series, b: &Series) -> Series {
    let mut out = Series::new();
    for (i, p) in a {
        for (j, r) in b {
            let prod = p * r;
            if !prod.is_zero() {
                series_add(&mut out, &BTreeMap::from([(i + j, prod)]), true);
            }
        }
    }
    out
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let off = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.src.len());
        let (line, column) = location(self.src, off);
        Err(ParseError { message: msg.into(), line, column })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
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
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Series, ParseError> {
        let mut acc = Series::new();
        let mut sign = true;
        if self.eat('-') {
            sign = false;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term()?;
            series_add(&mut acc, &t, sign);
            if self.eat('+') {
                sign = true;
            } else if self.eat('-') {
                sign = false;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Series, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = series_mul(&acc, &f);
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected integer"),
        }
    }

    fn factor(&mut self) -> Result<Series, ParseError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            let neg = self.eat('-');
            let n = self.integer()?;
            let k: u32 = match u32::try_from(&n) {
                Ok(k) if k <= 1000 => k,
                _ => return self.err("exponent too large"),
            };
            if neg {
                base = match invert_series_unit(&base) {
                    Some(b) => b,
                    None => return self.err("negative power of a non-unit"),
                };
            }
            let mut acc = BTreeMap::from([(0, Poly::one(self.sig))]);
            for _ in 0..k {
                acc = series_mul(&acc, &base);
            }
            base = acc;
        }
        Ok(base)
    }

    fn name_arg(&mut self) -> Result<usize, ParseError> {
        self.expect('(')?;
        let name = match self.peek().cloned() {
            Some(Tok::Name(s)) => s,
            _ => return self.err("expected generator name"),
        };
        let idx = match self.sig.gen_index(&name) {
            Some(i) => i,
            None => return self.err(format!("unknown generator `{name}`")),
        };
        self.pos += 1;
        self.expect(')')?;
        Ok(idx)
    }

    fn atom(&mut self) -> Result<Series, ParseError> {
        let single = |p: Poly| BTreeMap::from([(0i64, p)]);
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut c = Q::from_integer(n);
                if self.eat('/') {
                    let d = self.integer()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    c /= Q::from_integer(d);
                }
                let p = Poly::constant(self.sig, c);
                Ok(if p.is_zero() { Series::new() } else { single(p) })
            }
            Some(Tok::Name(s)) => {
                self.pos += 1;
                match s.as_str() {
                    "hbar" => Ok(BTreeMap::from([(1, Poly::one(self.sig))])),
                    "pd" => {
                        let i = self.name_arg()?;
                        Ok(single(Poly::var(self.sig, self.sig.vector_var(i))))
                    }
                    "dd" => {
                        let i = self.name_arg()?;
                        Ok(single(Poly::var(self.sig, self.sig.form_var(i))))
                    }
                    _ => match self.sig.gen_index(&s) {
                        Some(i) => Ok(single(Poly::var(self.sig, self.sig.gen_var(i)))),
                        None => {
                            self.pos -= 1;
                            self.err(format!("unknown generator `{s}`"))
                        }
                    },
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.err("expected a factor"),
        }
    }
}

fn invert_series_unit(s: &Series) -> Option<Series> {
    if s.len() != 1 {
        return None;
    }
    let (k, p) = s.iter().next()?;
    Some(BTreeMap::from([(-k, p.inverse_unit()?)]))
}

/// Parse an expression that may involve `hbar`.
pub fn parse_series(sig: &Arc<Signature>, src: &str) -> Result<Series, ParseError> {
    let toks = lex(src).map_err(|(m, off)| {
        let (line, column) = location(src, off);
        ParseError { message: m, line, column }
    })?;
    let mut p = Parser { src, toks, pos: 0, sig };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parse an `hbar`-free expression.
pub fn parse(sig: &Arc<Signature>, src: &str) -> Result<Poly, ParseError> {
    let s = parse_series(sig, src)?;
    match s.len() {
        0 => Ok(Poly::zero(sig)),
        1 if s.contains_key(&0) => Ok(s.into_values().next().unwrap()),
        _ => Err(ParseError { message: "unexpected `hbar`".into(), line: 1, column: 1 }),
    }
}

fn fmt_rational(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn factors(sig: &Signature, hbar: i64, m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    match hbar {
        0 => {}
        1 => out.push("hbar".to_string()),
        k => out.push(format!("hbar^{k}")),
    }
    for (v, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => out.push(sig.var_name(v)),
            _ => out.push(format!("{}^{}", sig.var_name(v), e)),
        }
    }
    out
}

fn write_terms<'a>(sig: &Signature, items: impl Iterator<Item = (i64, &'a Monomial, &'a Q)>) -> String {
    let mut s = String::new();
    for (idx, (h, m, c)) in items.enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        let fs = factors(sig, h, m);
        let body = if fs.is_empty() {
            fmt_rational(&a)
        } else if a.is_one() {
            fs.join("*")
        } else {
            format!("{}*{}", fmt_rational(&a), fs.join("*"))
        };
        if idx == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Canonical string: terms in monomial order, explicit `*`.
pub fn serialize(p: &Poly) -> String {
    write_terms(p.sig(), p.terms().iter().map(|(m, c)| (0, m, c)))
}

/// Canonical string of an `hbar` series: ascending `hbar` power, then monomial order.
pub fn serialize_series(sig: &Signature, s: &Series) -> String {
    write_terms(sig, s.iter().flat_map(|(k, p)| p.terms().iter().map(move |(m, c)| (*k, m, c))))
}
