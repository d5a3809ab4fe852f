use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use super::{LinExpr, MilpError, MilpModel, Sense, VarId, VarKind};
use crate::stl::{Formula, Interval};

/// Formula flattened into an arena; children precede parents.
#[derive(Clone, Debug)]
enum Node {
    Pred(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Eventually(Interval, usize),
    Always(Interval, usize),
    Until(Interval, usize, usize),
    Release(Interval, usize, usize),
}

fn flatten(f: &Formula, arena: &mut Vec<Node>) -> Result<usize, MilpError> {
    let node = match f {
        Formula::Predicate(i) => Node::Pred(*i),
        Formula::Not(_) => return Err(MilpError::NegatedFormula),
        Formula::And(gs) => Node::And(gs.iter().map(|g| flatten(g, arena)).collect::<Result<_, _>>()?),
        Formula::Or(gs) => Node::Or(gs.iter().map(|g| flatten(g, arena)).collect::<Result<_, _>>()?),
        Formula::Eventually(i, g) => Node::Eventually(*i, flatten(g, arena)?),
        Formula::Always(i, g) => Node::Always(*i, flatten(g, arena)?),
        Formula::Until(i, l, r) => {
            let (l, r) = (flatten(l, arena)?, flatten(r, arena)?);
            Node::Until(*i, l, r)
        }
        Formula::Release(i, l, r) => {
            let (l, r) = (flatten(l, arena)?, flatten(r, arena)?);
            Node::Release(*i, l, r)
        }
    };
    arena.push(node);
    Ok(arena.len() - 1)
}

/// Predicate indicators `z[row][time]` for every row and window time.
#[derive(Clone, Debug, PartialEq)]
pub struct PredicateGrid {
    pub start: usize,
    pub vars: Vec<Vec<VarId>>,
}

impl PredicateGrid {
    pub fn get(&self, row: usize, time: usize) -> Option<VarId> {
        self.vars.get(row)?.get(time.checked_sub(self.start)?).copied()
    }
}

/// Indicators created by an encoding pass.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingResult {
    /// Keyed by (node id, absolute time); node ids number subformulas in
    /// post-order, the root having the largest id.
    pub indicators: BTreeMap<(usize, usize), VarId>,
    /// Keyed by (row, absolute time).
    pub predicates: BTreeMap<(usize, usize), VarId>,
    pub big_m: f64,
}

impl EncodingResult {
    pub fn binary_count(&self) -> usize {
        self.predicates.len()
    }
}

/// Lazy big-M encoder over output expressions `y[time - start][row]`.
///
/// Indicators are memoized per (node, time) and only created when requested
/// from a root, so unused rows and unreachable times cost nothing.
#[derive(Debug)]
pub struct StlEncoder {
    arena: Vec<Node>,
    root: usize,
    start: usize,
    outputs: Vec<Vec<LinExpr>>,
    big_m: f64,
    indicators: BTreeMap<(usize, usize), VarId>,
    predicates: BTreeMap<(usize, usize), VarId>,
    aux: usize,
}

impl StlEncoder {
    pub fn new(f: &Formula, start: usize, outputs: Vec<Vec<LinExpr>>, big_m: f64) -> Result<Self, MilpError> {
        if !(big_m > 0.0 && big_m.is_finite()) {
            return Err(MilpError::NonPositiveBigM(big_m));
        }
        let mut arena = Vec::new();
        let root = flatten(f, &mut arena)?;
        Ok(Self {
            arena,
            root,
            start,
            outputs,
            big_m,
            indicators: BTreeMap::new(),
            predicates: BTreeMap::new(),
            aux: 0,
        })
    }

    /// Binary `z` with `z = 1 => y >= 0` and `z = 0 => y <= 0`.
    pub fn predicate(&mut self, model: &mut MilpModel, row: usize, time: usize) -> Result<VarId, MilpError> {
        if let Some(v) = self.predicates.get(&(row, time)) {
            return Ok(*v);
        }
        let y = time
            .checked_sub(self.start)
            .and_then(|k| self.outputs.get(k))
            .and_then(|s| s.get(row))
            .ok_or(MilpError::WindowTooShort { time })?
            .clone();
        let z = model.add_var(format!("zp{}_{}", row + 1, time), VarKind::Binary, 0.0, 1.0);
        // the expression's own range, when finite, is a tighter valid constant
        let (lo, hi) = y.range(model);
        let k_up = if hi.is_finite() { self.big_m.min(hi.max(0.0)) } else { self.big_m };
        let k_down = if lo.is_finite() { self.big_m.min((-lo).max(0.0)) } else { self.big_m };
        let mut upper = y.clone();
        upper.add_term(z, -k_up);
        model.add_constraint(upper, Sense::Le, 0.0);
        let mut lower = y;
        lower.add_term(z, -k_down);
        model.add_constraint(lower, Sense::Ge, -k_down);
        self.predicates.insert((row, time), z);
        Ok(z)
    }

    fn fresh(&mut self, model: &mut MilpModel) -> VarId {
        self.aux += 1;
        model.add_var(format!("za{}", self.aux), VarKind::Continuous, 0.0, 1.0)
    }

    fn conj(&mut self, model: &mut MilpModel, zs: &[VarId], name: Option<VarId>) -> VarId {
        if zs.len() == 1 && name.is_none() {
            return zs[0];
        }
        let z = name.unwrap_or_else(|| self.fresh(model));
        for &c in zs {
            model.add_constraint(LinExpr::var(z).with_term(c, -1.0), Sense::Le, 0.0);
        }
        let mut sum = LinExpr::var(z);
        for &c in zs {
            sum.add_term(c, -1.0);
        }
        model.add_constraint(sum, Sense::Ge, 1.0 - zs.len() as f64);
        z
    }

    fn disj(&mut self, model: &mut MilpModel, zs: &[VarId], name: Option<VarId>) -> VarId {
        if zs.len() == 1 && name.is_none() {
            return zs[0];
        }
        let z = name.unwrap_or_else(|| self.fresh(model));
        for &c in zs {
            model.add_constraint(LinExpr::var(z).with_term(c, -1.0), Sense::Ge, 0.0);
        }
        let mut sum = LinExpr::var(z);
        for &c in zs {
            sum.add_term(c, -1.0);
        }
        model.add_constraint(sum, Sense::Le, 0.0);
        z
    }

    fn node(&mut self, model: &mut MilpModel, id: usize, t: usize) -> Result<VarId, MilpError> {
        if let Node::Pred(row) = self.arena[id] {
            let z = self.predicate(model, row, t)?;
            self.indicators.insert((id, t), z);
            return Ok(z);
        }
        if let Some(v) = self.indicators.get(&(id, t)) {
            return Ok(*v);
        }
        let z = model.add_var(format!("zn{}_{}", id, t), VarKind::Continuous, 0.0, 1.0);
        match self.arena[id].clone() {
            Node::Pred(_) => unreachable!(),
            Node::And(cs) => {
                let zs = cs.iter().map(|&c| self.node(model, c, t)).collect::<Result<Vec<_>, _>>()?;
                self.conj(model, &zs, Some(z));
            }
            Node::Or(cs) => {
                let zs = cs.iter().map(|&c| self.node(model, c, t)).collect::<Result<Vec<_>, _>>()?;
                self.disj(model, &zs, Some(z));
            }
            Node::Eventually(i, c) => {
                let zs = i.offsets().map(|k| self.node(model, c, t + k)).collect::<Result<Vec<_>, _>>()?;
                self.disj(model, &zs, Some(z));
            }
            Node::Always(i, c) => {
                let zs = i.offsets().map(|k| self.node(model, c, t + k)).collect::<Result<Vec<_>, _>>()?;
                self.conj(model, &zs, Some(z));
            }
            Node::Until(i, l, r) | Node::Release(i, l, r) => {
                let until = matches!(self.arena[id], Node::Until(..));
                let mut prefix = Vec::new();
                let mut terms = Vec::new();
                for k in 0..=i.end() as usize {
                    prefix.push(self.node(model, l, t + k)?);
                    if k >= i.start() as usize {
                        let mut group = prefix.clone();
                        group.insert(0, self.node(model, r, t + k)?);
                        terms.push(if until { self.conj(model, &group, None) } else { self.disj(model, &group, None) });
                    }
                }
                if until {
                    self.disj(model, &terms, Some(z));
                } else {
                    self.conj(model, &terms, Some(z));
                }
            }
        }
        self.indicators.insert((id, t), z);
        Ok(z)
    }

    /// Indicator of the whole formula at absolute time `t`.
    pub fn root(&mut self, model: &mut MilpModel, t: usize) -> Result<VarId, MilpError> {
        self.node(model, self.root, t)
    }

    pub fn finish(self) -> EncodingResult {
        EncodingResult { indicators: self.indicators, predicates: self.predicates, big_m: self.big_m }
    }
}

/// Eagerly creates predicate indicators for every row and time of `outputs`.
pub fn encode_predicates(
    model: &mut MilpModel,
    start: usize,
    outputs: &[Vec<LinExpr>],
    big_m: f64,
) -> Result<PredicateGrid, MilpError> {
    let rows = outputs.first().map_or(0, Vec::len);
    let mut enc = StlEncoder::new(&Formula::Predicate(0), start, outputs.to_vec(), big_m)?;
    let mut vars = Vec::with_capacity(rows);
    for i in 0..rows {
        let row = (0..outputs.len()).map(|k| enc.predicate(model, i, start + k)).collect::<Result<Vec<_>, _>>()?;
        vars.push(row);
    }
    Ok(PredicateGrid { start, vars })
}

/// Encodes root indicators of `f` for every time in `times`.
pub fn encode_formula(
    model: &mut MilpModel,
    f: &Formula,
    start: usize,
    outputs: Vec<Vec<LinExpr>>,
    big_m: f64,
    times: Range<usize>,
) -> Result<(Vec<VarId>, EncodingResult), MilpError> {
    let mut enc = StlEncoder::new(f, start, outputs, big_m)?;
    let roots = times.map(|t| enc.root(model, t)).collect::<Result<Vec<_>, _>>()?;
    Ok((roots, enc.finish()))
}

/// Forces every root indicator to one.
pub fn assert_window(model: &mut MilpModel, roots: &[VarId]) {
    for &z in roots {
        model.add_constraint(LinExpr::var(z), Sense::Eq, 1.0);
    }
}
