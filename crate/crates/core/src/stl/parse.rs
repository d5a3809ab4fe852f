//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula := conj ('|' conj)*
//! conj    := binary ('&' binary)*
//! binary  := unary (('U' | 'R') interval unary)*        left associative
//! unary   := '!' unary | ('G' | 'F') interval unary | atom
//! atom    := 'p'N | name | '(' affine ('>=' | '<=') affine ')' | '(' formula ')'
//! interval:= '[' int ',' int ']'
//! affine  := ['-'] term (('+' | '-') term)*
//! term    := number ['*'] var | var | number          var := 'x'N | 'u'N
//! ```

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use super::{AffinePredicate, Formula, Interval, ParseError, ParseErrorKind};

/// Resolves predicate names and collects inline affine predicates while parsing.
#[derive(Clone, Debug, Default)]
pub struct PredicateTable {
    /// Number of output rows that exist before any inline predicate is added.
    /// `None` accepts any `pN`.
    pub base_rows: Option<usize>,
    bindings: Vec<(String, usize)>,
    inline: Vec<AffinePredicate>,
}

impl PredicateTable {
    pub fn new(base_rows: usize) -> Self {
        Self { base_rows: Some(base_rows), ..Self::default() }
    }

    /// Binds `name` to the zero-based output row `row`.
    pub fn bind(&mut self, name: impl Into<String>, row: usize) {
        self.bindings.push((name.into(), row));
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, r)| *r)
    }

    /// Inline predicates in row order; row `base_rows + k` holds `inline()[k]`.
    pub fn inline(&self) -> &[AffinePredicate] {
        &self.inline
    }

    fn add_inline(&mut self, p: AffinePredicate) -> usize {
        if let Some(k) = self.inline.iter().position(|q| *q == p) {
            return self.base_rows.unwrap_or(0) + k;
        }
        self.inline.push(p);
        self.base_rows.unwrap_or(0) + self.inline.len() - 1
    }
}

/// Parses a formula that only uses `pN` predicates.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, &mut PredicateTable::default())
}

/// Parses a formula, resolving names and inline predicates through `table`.
pub fn parse_with(text: &str, table: &mut PredicateTable) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, table, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.tokens.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Ge,
    Le,
    Plus,
    Minus,
    Star,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Some(Tok::Bang),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Pipe),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
            continue;
        }
        if (c == b'>' || c == b'<') && bytes.get(i + 1) == Some(&b'=') {
            out.push((if c == b'>' { Tok::Ge } else { Tok::Le }, start));
            i += 2;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let value: f64 = text[start..i].parse().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::Syntax("malformed number".to_owned()),
            })?;
            out.push((Tok::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_owned()), start));
            continue;
        }
        return Err(ParseError {
            position: start,
            kind: ParseErrorKind::Syntax(alloc::format!("unexpected character {:?}", c as char)),
        });
    }
    Ok(out)
}

/// `p12` -> Some(12), `x3` with prefix 'x' -> Some(3).
fn indexed(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Parser<'t> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    table: &'t mut PredicateTable,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn syntax(&self, msg: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => alloc::format!("{msg} (found {t:?})"),
            None => alloc::format!("{msg} (found end of input)"),
        };
        ParseError { position: self.offset(), kind: ParseErrorKind::Syntax(found) }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.syntax(&alloc::format!("expected {what}")))
        }
    }

    fn keyword(&self) -> Option<char> {
        match self.peek() {
            Some(Tok::Ident(s)) if matches!(s.as_str(), "G" | "F" | "U" | "R") => s.chars().next(),
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut parts = alloc::vec![self.conj()?];
        while self.eat(&Tok::Pipe) {
            parts.push(self.conj()?);
        }
        Ok(Formula::or(parts))
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = alloc::vec![self.binary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.binary()?);
        }
        Ok(Formula::and(parts))
    }

    fn binary(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while let Some(k @ ('U' | 'R')) = self.keyword() {
            self.pos += 1;
            let i = self.interval()?;
            let right = self.unary()?;
            left = if k == 'U' { Formula::until(i, left, right) } else { Formula::release(i, left, right) };
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.unary()?));
        }
        match self.keyword() {
            Some('G') => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(Formula::always(i, self.unary()?))
            }
            Some('F') => {
                self.pos += 1;
                let i = self.interval()?;
                Ok(Formula::eventually(i, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        let at = self.offset();
        self.expect(&Tok::LBracket, "'['")?;
        let a = self.bound_value()?;
        self.expect(&Tok::Comma, "','")?;
        let b = self.bound_value()?;
        self.expect(&Tok::RBracket, "']'")?;
        if a < 0 || b <= a || b > u32::MAX as i64 {
            return Err(ParseError { position: at, kind: ParseErrorKind::Bound { start: a, end: b } });
        }
        Ok(Interval::new(a as u32, b as u32).expect("checked above"))
    }

    fn bound_value(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Number(v)) if libm::trunc(*v) == *v && *v <= i64::MAX as f64 => {
                let v = *v as i64;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.syntax("expected a non-negative integer time bound")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(row) = self.table.lookup(&name) {
                    return Ok(Formula::Predicate(row));
                }
                if let Some(n) = indexed(&name, 'p') {
                    let known = self.table.base_rows.is_none_or(|rows| n <= rows);
                    if n >= 1 && known {
                        return Ok(Formula::Predicate(n - 1));
                    }
                }
                Err(ParseError { position: at, kind: ParseErrorKind::UnknownPredicate(name) })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let save = self.pos;
                if let Some(pred) = self.try_affine() {
                    let row = self.table.add_inline(pred);
                    return Ok(Formula::Predicate(row));
                }
                self.pos = save;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => Err(self.syntax("expected a predicate or '('")),
        }
    }

    /// Parses `affine (>=|<=) affine )`, leaving the cursor after `)`.
    fn try_affine(&mut self) -> Option<AffinePredicate> {
        let lhs = self.affine()?;
        let ge = match self.peek()? {
            Tok::Ge => true,
            Tok::Le => false,
            _ => return None,
        };
        self.pos += 1;
        let rhs = self.affine()?;
        if !self.eat(&Tok::RParen) {
            return None;
        }
        // y = lhs - rhs for >=, rhs - lhs for <=
        let (pos, neg) = if ge { (lhs, rhs) } else { (rhs, lhs) };
        Some(pos.minus(&neg))
    }

    fn affine(&mut self) -> Option<AffinePredicate> {
        let mut acc = AffinePredicate::default();
        let mut sign = if self.eat(&Tok::Minus) { -1.0 } else { 1.0 };
        loop {
            self.term(sign, &mut acc)?;
            if self.eat(&Tok::Plus) {
                sign = 1.0;
            } else if self.eat(&Tok::Minus) {
                sign = -1.0;
            } else {
                return Some(acc);
            }
        }
    }

    fn term(&mut self, sign: f64, acc: &mut AffinePredicate) -> Option<()> {
        let coeff = match self.peek() {
            Some(Tok::Number(v)) => {
                let v = *v;
                self.pos += 1;
                self.eat(&Tok::Star);
                Some(v)
            }
            _ => None,
        };
        if let Some(Tok::Ident(name)) = self.peek() {
            let var = if let Some(k) = indexed(name, 'x') {
                Some((true, k))
            } else {
                indexed(name, 'u').map(|k| (false, k))
            };
            if let Some((state, k)) = var {
                if k == 0 {
                    return None;
                }
                self.pos += 1;
                let c = sign * coeff.unwrap_or(1.0);
                let list = if state { &mut acc.state } else { &mut acc.control };
                match list.iter_mut().find(|(j, _)| *j == k - 1) {
                    Some((_, v)) => *v += c,
                    None => list.push((k - 1, c)),
                }
                return Some(());
            }
        }
        let c = coeff?;
        acc.constant += sign * c;
        Some(())
    }
}
