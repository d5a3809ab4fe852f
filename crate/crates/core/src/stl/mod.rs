//! Signal temporal logic: syntax, parsing, positive normal form and the
//! quantitative robustness semantics.

mod formula;
mod parse;
mod pnf;
mod robustness;

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::Matrix;

pub use formula::{Formula, Interval};
pub use parse::{parse, parse_with, PredicateTable};
pub use pnf::to_pnf;
pub use robustness::{robustness, robustness_signal};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StlError {
    #[error("invalid interval [{start},{end}]: bounds must satisfy 0 <= a < b")]
    InvalidInterval { start: i64, end: i64 },
    #[error("trace too short: {needed} samples needed, {available} available")]
    TraceTooShort { needed: usize, available: usize },
    #[error("formula references predicate p{} but the trace has {width} signals", .predicate + 1)]
    WidthMismatch { predicate: usize, width: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Bound { start: i64, end: i64 },
    UnknownPredicate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", self.describe())]
pub struct ParseError {
    /// Byte offset into the formula text.
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn describe(&self) -> String {
        match &self.kind {
            ParseErrorKind::Syntax(m) => alloc::format!("syntax error at {}: {m}", self.position),
            ParseErrorKind::Bound { start, end } => alloc::format!(
                "invalid time bounds [{start},{end}] at {}: bounds must satisfy 0 <= a < b",
                self.position
            ),
            ParseErrorKind::UnknownPredicate(n) => {
                alloc::format!("unknown predicate {n:?} at {}", self.position)
            }
        }
    }
}

/// Affine secondary signal `sum state + sum control + constant`, the
/// predicate being `value >= 0`. Indices are zero-based.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffinePredicate {
    pub state: Vec<(usize, f64)>,
    pub control: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffinePredicate {
    pub(crate) fn minus(mut self, other: &AffinePredicate) -> AffinePredicate {
        fn sub(into: &mut Vec<(usize, f64)>, from: &[(usize, f64)]) {
            for (k, v) in from {
                match into.iter_mut().find(|(j, _)| j == k) {
                    Some((_, x)) => *x -= v,
                    None => into.push((*k, -v)),
                }
            }
        }
        sub(&mut self.state, &other.state);
        sub(&mut self.control, &other.control);
        self.constant -= other.constant;
        self
    }
}

/// Where an output row came from relative to the rows the user declared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOrigin {
    Original(usize),
    Negated(usize),
}

/// Secondary signal map `y = C x + D u + e`, one row per predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputMap {
    pub c: Matrix,
    pub d: Matrix,
    pub e: Vec<f64>,
    pub origin: Vec<RowOrigin>,
}

impl OutputMap {
    /// Panics when the row counts of `c`, `d` and `e` differ.
    pub fn new(c: Matrix, d: Matrix, e: Vec<f64>) -> Self {
        assert!(c.rows() == d.rows() && c.rows() == e.len(), "output map row mismatch");
        let origin = (0..e.len()).map(RowOrigin::Original).collect();
        Self { c, d, e, origin }
    }

    pub fn rows(&self) -> usize {
        self.e.len()
    }

    /// Appends an inline affine predicate as a new row. Returns `None` when it
    /// references a state or control index out of range.
    pub fn push_affine(&mut self, p: &AffinePredicate) -> Option<usize> {
        let (n, m) = (self.c.cols(), self.d.cols());
        let mut crow = alloc::vec![0.0; n];
        let mut drow = alloc::vec![0.0; m];
        for (k, v) in &p.state {
            *crow.get_mut(*k)? += v;
        }
        for (k, v) in &p.control {
            *drow.get_mut(*k)? += v;
        }
        let r = self.rows();
        self.c = append_row(&self.c, &crow);
        self.d = append_row(&self.d, &drow);
        self.e.push(p.constant);
        self.origin.push(RowOrigin::Original(r));
        Some(r)
    }

    /// Evaluates every row at `(x, u)`.
    pub fn eval(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut y = self.e.clone();
        self.c.mul_vec_add(x, &mut y);
        self.d.mul_vec_add(u, &mut y);
        y
    }

    /// Rebuilds a trace over these rows from a trace over the original rows.
    pub fn remap_trace(&self, original: &SignalTrace) -> SignalTrace {
        let mut out = SignalTrace::new(self.rows());
        let mut sample = alloc::vec![0.0; self.rows()];
        for t in 0..original.len() {
            let src = original.sample(t);
            for (s, o) in sample.iter_mut().zip(&self.origin) {
                *s = match *o {
                    RowOrigin::Original(i) => src[i],
                    RowOrigin::Negated(i) => -src[i],
                };
            }
            out.push(&sample);
        }
        out
    }
}

pub(crate) fn append_row(m: &Matrix, row: &[f64]) -> Matrix {
    let mut data = m.as_slice().to_vec();
    data.extend_from_slice(row);
    Matrix::from_row_major(m.rows() + 1, row.len(), data)
}

/// Samples `y[0..len]` of a `width`-dimensional signal with unit sample period.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalTrace {
    width: usize,
    data: Vec<f64>,
}

impl SignalTrace {
    pub fn new(width: usize) -> Self {
        Self { width, data: Vec::new() }
    }

    /// Builds a trace from per-time samples. Returns `None` on ragged input.
    pub fn from_samples<S: AsRef<[f64]>>(width: usize, samples: &[S]) -> Option<Self> {
        let mut tr = Self::new(width);
        for s in samples {
            if s.as_ref().len() != width {
                return None;
            }
            tr.push(s.as_ref());
        }
        Some(tr)
    }

    /// Panics when `sample.len()` differs from the width.
    pub fn push(&mut self, sample: &[f64]) {
        assert_eq!(sample.len(), self.width, "sample width mismatch");
        self.data.extend_from_slice(sample);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.data[t * self.width..(t + 1) * self.width]
    }

    pub fn sample_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.data[t * self.width..(t + 1) * self.width]
    }

    #[inline]
    pub fn get(&self, t: usize, i: usize) -> f64 {
        self.data[t * self.width + i]
    }

    /// Copy of samples `start..end`.
    pub fn window(&self, start: usize, end: usize) -> SignalTrace {
        SignalTrace { width: self.width, data: self.data[start * self.width..end * self.width].to_vec() }
    }

    /// Adds `shift` to every sample.
    pub fn shifted(&self, shift: f64) -> SignalTrace {
        SignalTrace { width: self.width, data: self.data.iter().map(|v| v + shift).collect() }
    }
}

/// Robustness `rho[t]` for every `t` with `t + horizon < len`.
///
/// Errors with [`StlError::TraceTooShort`] when no value is computable.
pub fn monitor(f: &Formula, trace: &SignalTrace) -> Result<Vec<f64>, StlError> {
    let h = f.horizon();
    if trace.len() <= h {
        return Err(StlError::TraceTooShort { needed: h + 1, available: trace.len() });
    }
    robustness_signal(f, trace)
}
