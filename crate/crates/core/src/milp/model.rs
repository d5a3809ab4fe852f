use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::MilpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Affine expression `sum coeff * var + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn var(v: VarId) -> Self {
        Self { terms: alloc::vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VarId, f64)>) -> Self {
        Self { terms: terms.into_iter().collect(), constant: 0.0 }
    }

    pub fn add_term(&mut self, v: VarId, c: f64) -> &mut Self {
        self.terms.push((v, c));
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &LinExpr, s: f64) -> &mut Self {
        self.terms.extend(other.terms.iter().map(|(v, c)| (*v, c * s)));
        self.constant += other.constant * s;
        self
    }

    pub fn with_term(mut self, v: VarId, c: f64) -> Self {
        self.add_term(v, c);
        self
    }

    /// Merges duplicate variables, drops zero coefficients and sorts by id.
    pub fn normalized(&self) -> LinExpr {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|(v, _)| *v);
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match out.last_mut() {
                Some((w, acc)) if *w == v => *acc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|(_, c)| *c != 0.0);
        LinExpr { terms: out, constant: self.constant }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0.0)
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * values[v.0]).sum::<f64>()
    }

    /// Interval of values over the variable bounds of `model`.
    pub fn range(&self, model: &MilpModel) -> (f64, f64) {
        let (mut lo, mut hi) = (self.constant, self.constant);
        for (v, c) in &self.terms {
            let var = &model.vars[v.0];
            let (a, b) = (c * var.lower, c * var.upper);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            // 0 * inf must not poison the bound
            if *c != 0.0 {
                lo += a;
                hi += b;
            }
        }
        (lo, hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// `sum coeff * var  sense  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate the constraint (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// Minimization model with continuous and binary variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpModel {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: LinExpr,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> VarId {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            VarKind::Continuous => (lower, upper),
        };
        self.vars.push(Variable { name: name.into(), kind, lower, upper });
        VarId(self.vars.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    /// Adds `expr sense rhs`; the constant of `expr` moves to the right side.
    pub fn add_constraint(&mut self, expr: LinExpr, sense: Sense, rhs: f64) -> usize {
        let e = expr.normalized();
        self.constraints.push(Constraint { terms: e.terms, sense, rhs: rhs - e.constant });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, objective: LinExpr) {
        self.objective = objective;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn var(&self, v: VarId) -> &Variable {
        &self.vars[v.0]
    }

    /// Checks references, bounds and finiteness.
    pub fn validate(&self) -> Result<(), MilpError> {
        let n = self.vars.len();
        for (i, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(MilpError::InvalidBounds(VarId(i)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(MilpError::InvalidBounds(VarId(i)));
            }
        }
        let check = |terms: &[(VarId, f64)]| -> Result<(), MilpError> {
            for (v, c) in terms {
                if v.0 >= n {
                    return Err(MilpError::UnknownVariable(*v));
                }
                if !c.is_finite() {
                    return Err(MilpError::NonFinite);
                }
            }
            Ok(())
        };
        check(&self.objective.terms)?;
        if !self.objective.constant.is_finite() {
            return Err(MilpError::NonFinite);
        }
        for c in &self.constraints {
            check(&c.terms)?;
            if !c.rhs.is_finite() {
                return Err(MilpError::NonFinite);
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        self.constraints.iter().map(|c| c.violation(values)).fold(bounds, f64::max)
    }
}
