//! Text format for polynomial systems.
//!
//! ```text
//! # comment
//! vars: x y
//! param: t            # optional
//! x^2 + (0.5-1i)*x*y - 3
//! 2 y - t*x
//! ```
//!
//! One polynomial per line. A term is a product of factors, optionally
//! separated by `*`; a factor is a decimal literal, a complex literal `(a+bi)`,
//! or a variable with an optional `^exponent`. Decimal literals are rounded to
//! the nearest double.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};

/// A monomial with its coefficient. `exps[i]` is the exponent of circuit
/// input `i` (the parameter first when present, then the variables).
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exps: Vec<u32>,
}

/// A parsed polynomial system, kept in expanded (term list) form.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    pub vars: Vec<String>,
    pub param: Option<String>,
    pub polys: Vec<Vec<Term>>,
}

impl PolySystem {
    /// Number of variables (excluding the parameter).
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.vars.len() + self.param.is_some() as usize
    }

    /// Compiles to a circuit. Powers are built by repeated squaring and shared
    /// between terms; a unit coefficient produces no multiplication.
    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(self.n_inputs());
        let mut powers: HashMap<(usize, u32), usize> = HashMap::new();
        for poly in &self.polys {
            let mut terms = Vec::with_capacity(poly.len());
            for term in poly {
                let factors: Vec<usize> = term
                    .exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(v, &e)| power(&mut b, &mut powers, v, e))
                    .collect();
                let node = if factors.is_empty() {
                    b.constant(term.coeff)
                } else {
                    let mono = b.product(&factors);
                    b.scale(term.coeff, mono)
                };
                terms.push(node);
            }
            let out = b.sum(&terms);
            b.output(out);
        }
        b.build()
    }

    /// Renders the system in the text format; `parse_system` reads it back
    /// to an identical value.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars: {}\n", self.vars.join(" "));
        if let Some(p) = &self.param {
            let _ = writeln!(s, "param: {p}");
        }
        let names: Vec<&str> = self
            .param
            .iter()
            .chain(self.vars.iter())
            .map(String::as_str)
            .collect();
        for poly in &self.polys {
            if poly.is_empty() {
                s.push_str("0\n");
                continue;
            }
            let rendered: Vec<String> = poly
                .iter()
                .map(|t| {
                    let sign = if t.coeff.im.is_sign_negative() { '-' } else { '+' };
                    let mut r = format!("({:?}{}{:?}i)", t.coeff.re, sign, t.coeff.im.abs());
                    for (v, &e) in t.exps.iter().enumerate() {
                        match e {
                            0 => {}
                            1 => {
                                let _ = write!(r, "*{}", names[v]);
                            }
                            _ => {
                                let _ = write!(r, "*{}^{}", names[v], e);
                            }
                        }
                    }
                    r
                })
                .collect();
            s.push_str(&rendered.join(" + "));
            s.push('\n');
        }
        s
    }
}

fn power(b: &mut CircuitBuilder, cache: &mut HashMap<(usize, u32), usize>, v: usize, e: u32) -> usize {
    if e == 1 {
        return b.input(v);
    }
    if let Some(&k) = cache.get(&(v, e)) {
        return k;
    }
    let k = if e.is_multiple_of(2) {
        let h = power(b, cache, v, e / 2);
        b.mul(h, h)
    } else {
        let h = power(b, cache, v, e - 1);
        let x = b.input(v);
        b.mul(h, x)
    };
    cache.insert((v, e), k);
    k
}

/// Parses the text format described in the module documentation.
pub fn parse_system(text: &str) -> Result<PolySystem> {
    let mut vars: Option<Vec<String>> = None;
    let mut param: Option<String> = None;
    let mut polys = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let chars: Vec<char> = content.chars().collect();
        let mut cur = Cursor {
            chars: &chars,
            pos: 0,
            line,
        };
        cur.skip_ws();
        let header = ["vars", "param"]
            .into_iter()
            .find(|h| cur.rest_starts_with(h) && cur.after_word_is(h.len(), ':'));
        match header {
            Some(h) if polys.is_empty() => {
                cur.pos += h.len();
                cur.skip_ws();
                cur.pos += 1; // ':'
                let list = cur.identifier_list()?;
                if h == "vars" {
                    if vars.is_some() {
                        return Err(cur.error_at(0, "duplicate `vars:` line"));
                    }
                    if list.is_empty() {
                        return Err(Error::EmptySystem);
                    }
                    vars = Some(list.into_iter().map(|(n, _)| n).collect());
                } else {
                    if param.is_some() {
                        return Err(cur.error_at(0, "duplicate `param:` line"));
                    }
                    match list.as_slice() {
                        [(n, _)] => param = Some(n.clone()),
                        _ => return Err(cur.error_at(0, "`param:` takes exactly one name")),
                    }
                }
            }
            Some(_) => return Err(cur.error("header line after the first polynomial")),
            None => {
                let Some(vs) = &vars else {
                    return Err(cur.error("expected `vars:` before the first polynomial"));
                };
                if names.is_empty() {
                    let all = param.iter().chain(vs.iter());
                    for (i, n) in all.enumerate() {
                        if names.insert(n.clone(), i).is_some() {
                            return Err(Error::Syntax {
                                line,
                                column: 1,
                                message: format!("name `{n}` declared twice"),
                            });
                        }
                    }
                }
                polys.push(cur.polynomial(&names)?);
            }
        }
    }
    let vars = vars.ok_or(Error::EmptySystem)?;
    if polys.is_empty() {
        return Err(Error::EmptySystem);
    }
    Ok(PolySystem { vars, param, polys })
}

struct Cursor<'a> {
    chars: &'a [char],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn rest_starts_with(&self, word: &str) -> bool {
        word.chars()
            .enumerate()
            .all(|(k, c)| self.chars.get(self.pos + k) == Some(&c))
    }

    fn after_word_is(&self, len: usize, c: char) -> bool {
        let mut k = self.pos + len;
        while self.chars.get(k).is_some_and(|c| c.is_whitespace()) {
            k += 1;
        }
        self.chars.get(k) == Some(&c)
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn error_at(&self, pos: usize, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: pos + 1,
            message: message.to_string(),
        }
    }

    fn identifier(&mut self) -> Option<(String, usize)> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        Some((self.chars[start..self.pos].iter().collect(), start))
    }

    /// Names separated by whitespace or commas, up to the end of the line.
    fn identifier_list(&mut self) -> Result<Vec<(String, usize)>> {
        let mut out = Vec::new();
        loop {
            while self.peek().is_some_and(|c| c.is_whitespace() || c == ',') {
                self.pos += 1;
            }
            if self.at_end() {
                return Ok(out);
            }
            match self.identifier() {
                Some(id) => out.push(id),
                None => return Err(self.error("expected a name")),
            }
        }
    }

    fn polynomial(&mut self, names: &HashMap<String, usize>) -> Result<Vec<Term>> {
        let n_inputs = names.len();
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negative = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let mut term = self.term(names, n_inputs)?;
            if negative {
                term.coeff = -term.coeff;
            }
            terms.push(term);
            self.skip_ws();
            match self.peek() {
                None => return Ok(terms),
                Some('+') => negative = false,
                Some('-') => negative = true,
                Some(_) => return Err(self.error("expected `+`, `-` or end of line")),
            }
            self.pos += 1;
        }
    }

    fn starts_factor(&self) -> bool {
        self.peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '(')
    }

    fn term(&mut self, names: &HashMap<String, usize>, n_inputs: usize) -> Result<Term> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut exps = vec![0u32; n_inputs];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '.' => coeff *= self.decimal()?,
                Some('(') => coeff *= self.complex()?,
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let (name, at) = self.identifier().expect("identifier start");
                    let Some(&v) = names.get(&name) else {
                        return Err(Error::UnknownVariable {
                            name,
                            line: self.line,
                            column: at + 1,
                        });
                    };
                    self.skip_ws();
                    let e = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        self.exponent()?
                    } else {
                        1
                    };
                    exps[v] = exps[v]
                        .checked_add(e)
                        .ok_or_else(|| self.error("exponent too large"))?;
                }
                _ => return Err(self.error("expected a term")),
            }
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                continue;
            }
            if !self.starts_factor() {
                return Ok(Term { coeff, exps });
            }
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a nonnegative integer exponent"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| self.error_at(start, "exponent too large"))
    }

    /// Unsigned decimal literal with optional fraction and exponent.
    fn decimal(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |cur: &mut Self| {
            let s = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.pos += 1;
            }
            cur.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(self.error_at(start, "malformed number"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // not an exponent: leave `e` for the next factor
                self.pos = save;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.error_at(start, "malformed number"))
    }

    /// `(a+bi)`, `(a)`, `(bi)` or `(i)` with optional signs.
    fn complex(&mut self) -> Result<Complex64> {
        let open = self.pos;
        self.pos += 1;
        let mut re: Option<f64> = None;
        let mut im: Option<f64> = None;
        loop {
            self.skip_ws();
            let negative = match self.peek() {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') => {
                    self.pos += 1;
                    false
                }
                _ if re.is_none() && im.is_none() => false,
                _ => return Err(self.error("expected `+`, `-` or `)`")),
            };
            self.skip_ws();
            let magnitude = match self.peek() {
                Some(c) if c.is_ascii_digit() || c == '.' => Some(self.decimal()?),
                _ => None,
            };
            self.skip_ws();
            let imaginary = self.peek() == Some('i');
            if imaginary {
                self.pos += 1;
            }
            let value = match (magnitude, imaginary) {
                (None, false) => return Err(self.error("expected a number")),
                (m, _) => m.unwrap_or(1.0),
            };
            let value = if negative { -value } else { value };
            let slot = if imaginary { &mut im } else { &mut re };
            if slot.replace(value).is_some() {
                return Err(self.error("repeated part in complex literal"));
            }
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    return Ok(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)));
                }
                Some('+' | '-') => {}
                None => return Err(self.error_at(open, "unclosed `(`")),
                Some(_) => return Err(self.error("expected `+`, `-` or `)`")),
            }
        }
    }
}
