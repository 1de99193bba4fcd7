//! Line-oriented text format for domains.
//!
//! ```text
//! # comments start with '#'
//! dim = 3
//! q = (0, 0, 0)
//! locality_radius = 0.5
//! rho = Re(t) + |z|^2*|w|^2 + |z|^10 + |w|^10
//! ```
//!
//! Optional keys: `bounding_radius`, `k`, `d`, `family`, `plurisubharmonic`.
//! Expressions are sums of products of factors, where a factor is a number,
//! `i`, a variable `v` or `conj(v)` with an optional `^n`, `|v|^2m`,
//! `Re(expr)`, `Im(expr)`, `conj(expr)` or a parenthesised expression.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::domain::{variable_names, CPoint, DomainMeta, DomainSpec, FamilyTag};
use crate::error::{DomainError, ParseError};
use crate::poly::{fmt_real, ComplexPoly, HermitianPolynomial};

const KEYS: [&str; 9] =
    ["dim", "q", "locality_radius", "rho", "bounding_radius", "k", "d", "family", "plurisubharmonic"];

struct Entry {
    line: usize,
    column: usize,
    value: String,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Parse a domain file.
pub fn parse_domain(text: &str) -> Result<DomainSpec, ParseError> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(perr(line, col, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(perr(line, col, format!("unknown key `{key}`")));
        };
        if entries.contains_key(known) {
            return Err(perr(line, 1, format!("duplicate key `{key}`")));
        }
        let value = &content[eq + 1..];
        let lead = value.len() - value.trim_start().len();
        let column = content[..eq + 1 + lead].chars().count() + 1;
        entries.insert(known, Entry { line, column, value: value.trim().to_string() });
    }
    let last_line = text.lines().count().max(1);
    let require = |key: &str| -> Result<&Entry, ParseError> {
        entries.get(key).ok_or_else(|| perr(last_line, 1, format!("missing key `{key}`")))
    };

    let q_entry = require("q")?;
    let q = parse_point(q_entry)?;
    let dim = match entries.get("dim") {
        Some(e) => {
            let d = parse_uint(e)? as usize;
            if d != q.len() {
                return Err(perr(q_entry.line, q_entry.column, format!("q has {} entries but dim = {d}", q.len())));
            }
            d
        }
        None => q.len(),
    };
    if !(1..=6).contains(&dim) {
        return Err(perr(q_entry.line, q_entry.column, format!("unsupported dimension {dim}")));
    }
    let loc = parse_real(require("locality_radius")?)?;
    let rho_entry = require("rho")?;
    let names = variable_names(dim);
    let rho_poly = ExprParser::new(rho_entry, &names).parse_all()?;
    let rho = HermitianPolynomial::new(rho_poly).map_err(|e| perr(rho_entry.line, rho_entry.column, e.to_string()))?;

    let meta = DomainMeta {
        bounding_radius: entries.get("bounding_radius").map(parse_real).transpose()?,
        declared_k: entries.get("k").map(|e| parse_uint(e).map(|v| v as u32)).transpose()?,
        declared_d: entries.get("d").map(|e| parse_uint(e).map(|v| v as u32)).transpose()?,
        plurisubharmonic: entries.get("plurisubharmonic").map(parse_bool).transpose()?.unwrap_or(false),
    };
    let family = entries.get("family").map(parse_family).transpose()?.unwrap_or(FamilyTag::Custom);
    let dom = DomainSpec::new(rho, CPoint(q), loc, meta).map_err(|e| {
        let at = match e {
            DomainError::NotOnBoundary { .. } | DomainError::ZeroGradient => q_entry,
            _ => rho_entry,
        };
        perr(at.line, at.column, e.to_string())
    })?;
    Ok(dom.with_family(family))
}

fn parse_real(e: &Entry) -> Result<f64, ParseError> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| perr(e.line, e.column, format!("expected a real number, found `{}`", e.value)))
}

fn parse_uint(e: &Entry) -> Result<u64, ParseError> {
    e.value
        .parse::<u64>()
        .map_err(|_| perr(e.line, e.column, format!("expected a non-negative integer, found `{}`", e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool, ParseError> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(perr(e.line, e.column, format!("expected true or false, found `{other}`"))),
    }
}

fn parse_family(e: &Entry) -> Result<FamilyTag, ParseError> {
    Ok(match e.value.as_str() {
        "model" => FamilyTag::Model,
        "herbort" => FamilyTag::Herbort,
        "convex_control" => FamilyTag::ConvexControl,
        "ball" => FamilyTag::Ball,
        "custom" => FamilyTag::Custom,
        other => return Err(perr(e.line, e.column, format!("unknown family `{other}`"))),
    })
}

fn parse_point(e: &Entry) -> Result<Vec<Complex64>, ParseError> {
    let v = e.value.as_str();
    let inner = v
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(e.line, e.column, "expected a parenthesised point `(a, b, c)`"))?;
    let mut out = Vec::new();
    let mut offset = 1;
    for part in inner.split(',') {
        let lead = part.len() - part.trim_start().len();
        let sub = Entry { line: e.line, column: e.column + offset + lead, value: part.trim().to_string() };
        let p = ExprParser::new(&sub, &[]).parse_all()?;
        out.push(p.coeff(crate::poly::Monomial::ONE));
        offset += part.chars().count() + 1;
    }
    Ok(out)
}

/// Parse a single expression in the variables `names`.
pub fn parse_expression(text: &str, names: &[&str]) -> Result<ComplexPoly, ParseError> {
    let e = Entry { line: 1, column: 1, value: text.to_string() };
    ExprParser::new(&e, names).parse_all()
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    names: &'a [&'a str],
}

impl<'a> ExprParser<'a> {
    fn new(e: &Entry, names: &'a [&'a str]) -> Self {
        ExprParser { chars: e.value.chars().collect(), pos: 0, line: e.line, column: e.column, names }
    }

    fn n(&self) -> usize {
        self.names.len()
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        perr(self.line, self.column + self.pos, msg)
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

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn parse_all(mut self) -> Result<ComplexPoly, ParseError> {
        if self.peek().is_none() {
            return Err(self.err("empty expression"));
        }
        let p = self.expr()?;
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected `{c}`")));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<ComplexPoly, ParseError> {
        let mut acc = ComplexPoly::zero(self.n());
        let mut sign = 1.0;
        match self.peek() {
            Some('-') => {
                sign = -1.0;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(Complex64::new(sign, 0.0)));
            match self.peek() {
                Some('+') => sign = 1.0,
                Some('-') => sign = -1.0,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<ComplexPoly, ParseError> {
        let mut acc = self.power()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let start = self.pos;
            let f = self.power()?;
            acc = acc.mul(&f).map_err(|e| perr(self.line, self.column + start, e.to_string()))?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<ComplexPoly, ParseError> {
        let start = self.pos;
        let base = self.factor()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.uint()?;
            return base.pow(e).map_err(|err| perr(self.line, self.column + start, err.to_string()));
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u32>().map_err(|_| {
            self.pos = start;
            self.err("expected an integer exponent")
        })
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|v| *v == name)
    }

    fn factor(&mut self) -> Result<ComplexPoly, ParseError> {
        let n = self.n();
        let c = self.peek().ok_or_else(|| self.err("unexpected end of expression"))?;
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c == '|' {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let name = self.ident();
            let j = self.var_index(&name).ok_or_else(|| {
                self.pos = at;
                self.err(format!("expected a variable inside |..|, found `{name}`"))
            })?;
            self.expect('|')?;
            self.expect('^')?;
            let at = self.pos;
            let e = self.uint()?;
            if e == 0 || e % 2 != 0 {
                self.pos = at;
                return Err(self.err("exponent of |v| must be a positive even integer"));
            }
            let mut ex = vec![0u8; n];
            ex[j] = (e / 2).min(255) as u8;
            if e / 2 > 12 {
                self.pos = at;
                return Err(self.err(format!("degree {e} exceeds the degree cap")));
            }
            return Ok(ComplexPoly::monomial(n, &ex, &ex, Complex64::new(1.0, 0.0)));
        }
        if c.is_ascii_alphabetic() {
            let at = self.pos;
            let name = self.ident();
            match name.as_str() {
                "Re" | "Im" | "conj" => {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    return Ok(match name.as_str() {
                        "Re" => e.re(),
                        "Im" => e.im(),
                        _ => e.conj(),
                    });
                }
                "i" => return Ok(ComplexPoly::constant(n, Complex64::new(0.0, 1.0))),
                _ => {}
            }
            if let Some(j) = self.var_index(&name) {
                return Ok(ComplexPoly::var(n, j));
            }
            self.pos = at;
            return Err(self.err(format!("unknown identifier `{name}`")));
        }
        Err(self.err(format!("unexpected `{c}`")))
    }

    fn number(&mut self) -> Result<ComplexPoly, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.chars.len() && p.chars[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            let before = self.pos;
            digits(self);
            if self.pos == before {
                self.pos = save;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let x: f64 = s.parse().map_err(|_| {
            self.pos = start;
            self.err(format!("malformed number `{s}`"))
        })?;
        let imaginary = self.chars.get(self.pos) == Some(&'i')
            && !self.chars.get(self.pos + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
        if imaginary {
            self.pos += 1;
            return Ok(ComplexPoly::constant(self.n(), Complex64::new(0.0, x)));
        }
        Ok(ComplexPoly::constant(self.n(), Complex64::new(x, 0.0)))
    }
}

pub fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        return fmt_real(c.re);
    }
    let im = format!("{}i", fmt_real(c.im.abs()));
    let sign = if c.im < 0.0 { "-" } else { "+" };
    if c.re == 0.0 {
        return if c.im < 0.0 { format!("-{im}") } else { im };
    }
    format!("{}{sign}{im}", fmt_real(c.re))
}

/// Render a domain in the file format; parsing the output reproduces it.
pub fn to_text(dom: &DomainSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim = {}", dom.dimension());
    let q: Vec<String> = dom.q().coords().iter().map(|c| fmt_complex(*c)).collect();
    let _ = writeln!(out, "q = ({})", q.join(", "));
    let _ = writeln!(out, "locality_radius = {}", fmt_real(dom.locality_radius()));
    let _ = writeln!(out, "bounding_radius = {}", fmt_real(dom.bounding_radius()));
    if let Some(k) = dom.declared_k() {
        let _ = writeln!(out, "k = {k}");
    }
    if let Some(d) = dom.declared_d() {
        let _ = writeln!(out, "d = {d}");
    }
    let _ = writeln!(out, "family = {}", dom.family().as_str());
    if dom.is_plurisubharmonic() {
        let _ = writeln!(out, "plurisubharmonic = true");
    }
    let _ = writeln!(out, "rho = {}", dom.rho().to_grammar(&dom.names()));
    out
}
