//! CPLEX-style LP text for [`MilpModel`]: `Minimize`, `Subject To`, `Bounds`,
//! `Binaries`, `End`.
//!
//! Every variable gets a line in `Bounds` in id order, so a parsed file keeps
//! the variable order and a second export is byte-identical. Numbers use the
//! shortest decimal that reads back to the same `f64`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use stlmpc_core::milp::{LinExpr, MilpModel, Sense, VarId, VarKind};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("LP line {line}: {message}")]
pub struct LpError {
    pub line: usize,
    pub message: String,
}

const WRAP: usize = 100;
/// Words a lone name could be confused with.
const KEYWORDS: &[&str] = &[
    "free", "inf", "infinity", "end", "bounds", "bound", "binaries", "binary", "bin", "generals", "general", "gen",
    "integers", "minimize", "minimise", "minimum", "min", "maximize", "maximise", "maximum", "max", "st", "subject",
    "such",
];

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        && !KEYWORDS.contains(&name.to_ascii_lowercase().as_str())
        && !(name.len() > 1 && name.starts_with(['e', 'E']) && name[1..].bytes().all(|b| b.is_ascii_digit()))
}

/// Names written for each variable: the model name when it is a valid,
/// unique LP identifier, otherwise `v{id}` (suffixed until unique).
fn export_names(model: &MilpModel) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut keep = vec![false; model.vars.len()];
    for (i, v) in model.vars.iter().enumerate() {
        if valid_name(&v.name) && seen.insert(v.name.as_str()) {
            keep[i] = true;
        }
    }
    let mut taken: HashSet<String> = seen.iter().map(|s| s.to_string()).collect();
    model
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if keep[i] {
                return v.name.clone();
            }
            let mut name = format!("v{i}");
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            name
        })
        .collect()
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

struct Line {
    out: String,
    len: usize,
}

impl Line {
    fn push(&mut self, token: &str) {
        if self.len + token.len() + 1 > WRAP && self.len > 0 {
            self.out.push_str("\n   ");
            self.len = 3;
        }
        self.out.push(' ');
        self.out.push_str(token);
        self.len += token.len() + 1;
    }
}

fn write_terms(line: &mut Line, terms: &[(VarId, f64)], constant: f64, names: &[String]) {
    let mut first = true;
    let mut item = |coef: f64, name: Option<&str>| {
        let sign = if coef < 0.0 { "-" } else { "+" };
        let body = match name {
            Some(n) => format!("{} {n}", num(coef.abs())),
            None => num(coef.abs()),
        };
        let tok = if first && coef >= 0.0 { body } else { format!("{sign} {body}") };
        line.push(&tok);
        first = false;
    };
    for (v, c) in terms {
        item(*c, Some(&names[v.0]));
    }
    if constant != 0.0 || terms.is_empty() {
        item(constant, None);
    }
}

/// Writes `model` as LP text.
pub fn export_lp(model: &MilpModel) -> String {
    let names = export_names(model);
    let mut out = String::from("Minimize\n");
    let obj = model.objective.normalized();
    let mut line = Line { out: String::from(" obj:"), len: 5 };
    write_terms(&mut line, &obj.terms, obj.constant, &names);
    out.push_str(&line.out);
    out.push('\n');

    out.push_str("Subject To\n");
    for (i, c) in model.constraints.iter().enumerate() {
        let label = format!(" c{}:", i + 1);
        let mut line = Line { len: label.len(), out: label };
        write_terms(&mut line, &c.terms, 0.0, &names);
        line.push(c.sense.symbol());
        line.push(&num(c.rhs));
        out.push_str(&line.out);
        out.push('\n');
    }

    out.push_str("Bounds\n");
    for (v, name) in model.vars.iter().zip(&names) {
        let (lo, hi) = (v.lower, v.upper);
        let _ = if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            writeln!(out, " {name} free")
        } else if lo == hi {
            writeln!(out, " {name} = {}", num(lo))
        } else if hi == f64::INFINITY {
            writeln!(out, " {name} >= {}", num(lo))
        } else {
            writeln!(out, " {} <= {name} <= {}", num(lo), num(hi))
        };
    }

    let binaries: Vec<&str> =
        model.vars.iter().zip(&names).filter(|(v, _)| v.kind == VarKind::Binary).map(|(_, n)| n.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        let mut line = Line { out: String::new(), len: 0 };
        for b in binaries {
            line.push(b);
        }
        out.push_str(&line.out);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_header(line: &str) -> Option<(Section, bool)> {
    let l = line.trim().to_ascii_lowercase();
    let l = l.split_whitespace().collect::<Vec<_>>().join(" ");
    Some(match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, false),
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, true),
        "subject to" | "such that" | "st" | "s.t." | "st." => (Section::Constraints, false),
        "bounds" | "bound" => (Section::Bounds, false),
        "binaries" | "binary" | "bin" => (Section::Binaries, false),
        "generals" | "general" | "gen" | "integers" => (Section::Generals, false),
        "end" => (Section::End, false),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Num(f64),
    Plus,
    Minus,
    Colon,
    Sense(Sense),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Tok>, LpError> {
    let fail = |m: String| LpError { line, message: m };
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            b':' => {
                out.push(Tok::Colon);
                i += 1;
            }
            b'<' | b'>' | b'=' => {
                let mut j = i + 1;
                if j < b.len() && matches!(b[j], b'=' | b'<' | b'>') {
                    j += 1;
                }
                let sense = match &text[i..j] {
                    "<" | "<=" | "=<" => Sense::Le,
                    ">" | ">=" | "=>" => Sense::Ge,
                    "=" => Sense::Eq,
                    s => return Err(fail(format!("unknown operator {s:?}"))),
                };
                out.push(Tok::Sense(sense));
                i = j;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < b.len() && (b[j].is_ascii_digit() || b[j] == b'.') {
                    j += 1;
                }
                if j < b.len() && matches!(b[j], b'e' | b'E') {
                    let mut k = j + 1;
                    if k < b.len() && matches!(b[k], b'+' | b'-') {
                        k += 1;
                    }
                    if k < b.len() && b[k].is_ascii_digit() {
                        while k < b.len() && b[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let v = text[i..j].parse().map_err(|_| fail(format!("bad number {:?}", &text[i..j])))?;
                out.push(Tok::Num(v));
                i = j;
            }
            _ if c.is_ascii_alphabetic() || b"_!\"#$%&()/,;?@`'{}|~".contains(&c) => {
                let mut j = i;
                while j < b.len() && !matches!(b[j], b' ' | b'\t' | b'\r' | b'\n' | b'+' | b'-' | b':' | b'<' | b'>' | b'=')
                {
                    j += 1;
                }
                let word = &text[i..j];
                match word.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => out.push(Tok::Num(f64::INFINITY)),
                    _ => out.push(Tok::Name(word.to_string())),
                }
                i = j;
            }
            _ => return Err(fail(format!("unexpected character {:?}", c as char))),
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Builder {
    order: Vec<String>,
    index: HashMap<String, usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    binary: Vec<bool>,
    bounded: Vec<bool>,
}

impl Builder {
    fn id(&mut self, name: &str) -> usize {
        if let Some(i) = self.index.get(name) {
            return *i;
        }
        let i = self.order.len();
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.lower.push(0.0);
        self.upper.push(f64::INFINITY);
        self.binary.push(false);
        self.bounded.push(false);
        i
    }
}

/// Linear expression terms until a sense token (or the end).
fn parse_expr(toks: &[Tok], pos: &mut usize, b: &mut Builder, line: usize) -> Result<(Vec<(String, f64)>, f64), LpError> {
    let fail = |m: &str| LpError { line, message: m.to_string() };
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut first = true;
    while *pos < toks.len() && !matches!(toks[*pos], Tok::Sense(_)) {
        let mut sign = 1.0;
        let mut signed = false;
        while let Some(t @ (Tok::Plus | Tok::Minus)) = toks.get(*pos) {
            if *t == Tok::Minus {
                sign = -sign;
            }
            signed = true;
            *pos += 1;
        }
        if !first && !signed {
            return Err(fail("expected + or - between terms"));
        }
        first = false;
        let coef = match toks.get(*pos) {
            Some(Tok::Num(v)) => {
                *pos += 1;
                Some(*v)
            }
            _ => None,
        };
        match toks.get(*pos) {
            Some(Tok::Name(n)) => {
                b.id(n);
                terms.push((n.clone(), sign * coef.unwrap_or(1.0)));
                *pos += 1;
            }
            _ => match coef {
                Some(v) => constant += sign * v,
                None => return Err(fail("expected a coefficient or variable")),
            },
        }
    }
    Ok((terms, constant))
}

fn strip_label(toks: &[Tok]) -> &[Tok] {
    match toks {
        [Tok::Name(_), Tok::Colon, rest @ ..] => rest,
        _ => toks,
    }
}

/// Parses LP text produced by [`export_lp`] or any file using the same
/// subset (continuous and binary variables, linear rows).
pub fn parse_lp(text: &str) -> Result<MilpModel, LpError> {
    let mut section = None;
    let mut maximize = false;
    // (first line, text) of each statement; objective and rows may span lines
    let mut objective = (0, String::new());
    let mut rows: Vec<(usize, String)> = Vec::new();
    let mut bound_lines = Vec::new();
    let mut binary_lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('\\').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some((s, max)) = section_header(content) {
            if s == Section::Generals {
                return Err(LpError { line, message: "general integer variables are not supported".into() });
            }
            if s == Section::Objective {
                maximize = max;
                objective.0 = line;
            }
            section = Some(s);
            if s == Section::End {
                break;
            }
            continue;
        }
        match section {
            None => return Err(LpError { line, message: "text before the objective section".into() }),
            Some(Section::Objective) => {
                objective.1.push(' ');
                objective.1.push_str(content);
            }
            Some(Section::Constraints) => {
                // a new row starts with a label or after the previous row's rhs
                let starts_new = rows.last().is_none_or(|(_, r)| row_complete(r));
                if starts_new {
                    rows.push((line, content.to_string()));
                } else if let Some(last) = rows.last_mut() {
                    last.1.push(' ');
                    last.1.push_str(content);
                }
            }
            Some(Section::Bounds) => bound_lines.push((line, content.to_string())),
            Some(Section::Binaries) => binary_lines.push((line, content.to_string())),
            Some(Section::Generals) | Some(Section::End) => unreachable!(),
        }
    }
    if section != Some(Section::End) {
        return Err(LpError { line: text.lines().count(), message: "missing End".into() });
    }

    let mut b = Builder::default();
    // bounds first: they fix the variable order
    for (line, content) in &bound_lines {
        parse_bound(&tokenize(content, *line)?, &mut b, *line)?;
    }
    for (line, content) in &binary_lines {
        for tok in tokenize(content, *line)? {
            match tok {
                Tok::Name(n) => {
                    let i = b.id(&n);
                    b.binary[i] = true;
                    if !b.bounded[i] {
                        b.upper[i] = 1.0;
                    }
                }
                _ => return Err(LpError { line: *line, message: "expected a variable name".into() }),
            }
        }
    }

    let otoks = tokenize(&objective.1, objective.0)?;
    let mut pos = 0;
    let (oterms, oconst) = parse_expr(strip_label(&otoks), &mut pos, &mut b, objective.0)?;
    let mut parsed_rows = Vec::new();
    for (line, content) in &rows {
        let toks = tokenize(content, *line)?;
        let toks = strip_label(&toks);
        let mut pos = 0;
        let (terms, constant) = parse_expr(toks, &mut pos, &mut b, *line)?;
        let sense = match toks.get(pos) {
            Some(Tok::Sense(s)) => *s,
            _ => return Err(LpError { line: *line, message: "row has no comparison".into() }),
        };
        pos += 1;
        let (rhs_terms, rhs_const) = parse_expr(toks, &mut pos, &mut b, *line)?;
        if !rhs_terms.is_empty() || pos != toks.len() {
            return Err(LpError { line: *line, message: "right-hand side must be a constant".into() });
        }
        parsed_rows.push((terms, sense, rhs_const - constant));
    }

    let mut model = MilpModel::new();
    for i in 0..b.order.len() {
        let kind = if b.binary[i] { VarKind::Binary } else { VarKind::Continuous };
        model.add_var(b.order[i].clone(), kind, b.lower[i], b.upper[i]);
    }
    let expr = |terms: &[(String, f64)], b: &Builder| {
        LinExpr::from_terms(terms.iter().map(|(n, c)| (VarId(b.index[n]), *c)))
    };
    let mut obj = expr(&oterms, &b);
    obj.constant = oconst;
    if maximize {
        obj = obj.normalized();
        obj.terms.iter_mut().for_each(|(_, c)| *c = -*c);
        obj.constant = -obj.constant;
    }
    model.set_objective(obj);
    for (terms, sense, rhs) in parsed_rows {
        let e = expr(&terms, &b);
        model.add_constraint(e, sense, rhs);
    }
    Ok(model)
}

fn row_complete(row: &str) -> bool {
    // complete once a comparison is followed by a number
    let Some(idx) = row.rfind(['<', '>', '=']) else { return false };
    let rest = row[idx + 1..].trim();
    !rest.is_empty() && rest.trim_start_matches(['+', '-', ' ']).chars().next().is_some_and(|c| c.is_ascii_digit() || c == '.' || c == 'i' || c == 'I')
}

fn parse_bound(toks: &[Tok], b: &mut Builder, line: usize) -> Result<(), LpError> {
    let fail = |m: &str| Err(LpError { line, message: m.to_string() });
    let value = |toks: &[Tok]| -> Option<(f64, usize)> {
        match toks {
            [Tok::Minus, Tok::Num(v), ..] => Some((-v, 2)),
            [Tok::Plus, Tok::Num(v), ..] => Some((*v, 2)),
            [Tok::Num(v), ..] => Some((*v, 1)),
            _ => None,
        }
    };
    match toks {
        [Tok::Name(n), Tok::Name(kw)] if kw.eq_ignore_ascii_case("free") => {
            let i = b.id(n);
            b.lower[i] = f64::NEG_INFINITY;
            b.upper[i] = f64::INFINITY;
            b.bounded[i] = true;
            Ok(())
        }
        [Tok::Name(n), Tok::Sense(s), rest @ ..] => {
            let Some((v, used)) = value(rest) else { return fail("expected a bound value") };
            if used != rest.len() {
                return fail("unexpected tokens after bound");
            }
            let i = b.id(n);
            b.bounded[i] = true;
            match s {
                Sense::Le => b.upper[i] = v,
                Sense::Ge => b.lower[i] = v,
                Sense::Eq => {
                    b.lower[i] = v;
                    b.upper[i] = v;
                }
            }
            Ok(())
        }
        _ => {
            let Some((v, used)) = value(toks) else { return fail("unrecognized bound") };
            match &toks[used..] {
                [Tok::Sense(s), Tok::Name(n), tail @ ..] => {
                    let i = b.id(n);
                    b.bounded[i] = true;
                    match s {
                        Sense::Le => b.lower[i] = v,
                        Sense::Ge => b.upper[i] = v,
                        Sense::Eq => {
                            b.lower[i] = v;
                            b.upper[i] = v;
                        }
                    }
                    match tail {
                        [] => Ok(()),
                        [Tok::Sense(s2), rest @ ..] => {
                            let Some((w, used)) = value(rest) else { return fail("expected a bound value") };
                            if used != rest.len() {
                                return fail("unexpected tokens after bound");
                            }
                            match s2 {
                                Sense::Le => b.upper[i] = w,
                                Sense::Ge => b.lower[i] = w,
                                Sense::Eq => return fail("= cannot follow a bound"),
                            }
                            Ok(())
                        }
                        _ => fail("unexpected tokens after bound"),
                    }
                }
                _ => fail("unrecognized bound"),
            }
        }
    }
}
