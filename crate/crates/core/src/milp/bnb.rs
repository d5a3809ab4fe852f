use alloc::collections::BinaryHeap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::time::Duration;

use super::simplex::{LpData, LpOutcome, Tableau};
use super::{MilpError, MilpModel, Sense, SolveResult, SolveStatus, SolverConfig, VarKind};

/// Budget for parent tableaux kept alive for warm starts.
const WARM_START_BYTES: usize = 256 << 20;

enum Presolved {
    Ready(LpData),
    Infeasible,
}

/// Moves singleton rows into bounds and drops empty rows.
fn presolve(model: &MilpModel, cfg: &SolverConfig) -> Presolved {
    let n = model.vars.len();
    let mut lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    let mut rows = Vec::new();
    let (mut row_lo, mut row_hi) = (Vec::new(), Vec::new());
    let tol = cfg.feasibility_tolerance;
    for c in &model.constraints {
        let terms: Vec<(usize, f64)> = c.terms.iter().filter(|(_, a)| *a != 0.0).map(|(v, a)| (v.0, *a)).collect();
        let (lo, hi) = match c.sense {
            Sense::Le => (f64::NEG_INFINITY, c.rhs),
            Sense::Ge => (c.rhs, f64::INFINITY),
            Sense::Eq => (c.rhs, c.rhs),
        };
        match terms.as_slice() {
            [] => {
                if lo > tol || hi < -tol {
                    return Presolved::Infeasible;
                }
            }
            [(j, a)] => {
                let (l, h) = if *a > 0.0 { (lo / a, hi / a) } else { (hi / a, lo / a) };
                lower[*j] = lower[*j].max(l);
                upper[*j] = upper[*j].min(h);
            }
            _ => {
                rows.push(terms);
                row_lo.push(lo);
                row_hi.push(hi);
            }
        }
    }
    for j in 0..n {
        if model.vars[j].kind == VarKind::Binary {
            lower[j] = libm::ceil(lower[j] - cfg.integrality_tolerance);
            upper[j] = libm::floor(upper[j] + cfg.integrality_tolerance);
        }
        if lower[j] > upper[j] {
            if lower[j] > upper[j] + tol {
                return Presolved::Infeasible;
            }
            let mid = 0.5 * (lower[j] + upper[j]);
            lower[j] = mid;
            upper[j] = mid;
        }
    }
    let mut cost = vec![0.0; n];
    for (v, c) in &model.objective.terms {
        cost[v.0] += c;
    }
    Presolved::Ready(LpData { n, rows, row_lo, row_hi, cost, lower, upper })
}

struct Node {
    bound: f64,
    seq: u64,
    parent: Option<Rc<Tableau>>,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: smallest bound first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    cfg: &'a SolverConfig,
    lp: LpData,
    binaries: Vec<usize>,
    heap: BinaryHeap<Node>,
    seq: u64,
    incumbent: Option<(f64, Vec<f64>)>,
    warm_parents: usize,
}

impl Search<'_> {
    fn gap(&self, inc: f64) -> f64 {
        (self.cfg.mip_gap * inc.abs()).max(1e-9)
    }

    fn pruned(&self, bound: f64) -> bool {
        match &self.incumbent {
            Some((inc, _)) => bound >= inc - self.gap(*inc),
            None => false,
        }
    }

    /// Fresh solve with the given binaries fixed.
    fn cold(&self, fixings: &[(usize, f64)]) -> (Tableau, LpOutcome) {
        let mut lp = self.lp.clone();
        for &(j, v) in fixings {
            lp.lower[j] = v;
            lp.upper[j] = v;
        }
        let mut t = Tableau::new(&lp);
        let out = t.solve();
        (t, out)
    }

    fn branch_var(&self, x: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.binaries {
            let f = x[j] - libm::floor(x[j]);
            let frac = f.min(1.0 - f);
            if frac > self.cfg.integrality_tolerance && best.is_none_or(|(_, b)| frac > b) {
                best = Some((j, frac));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Handles a node whose LP relaxation solved to optimality.
    fn process(&mut self, tab: Tableau, fixings: Vec<(usize, f64)>) -> Result<(), MilpError> {
        let obj = tab.objective();
        if self.pruned(obj) {
            return Ok(());
        }
        let x = tab.x();
        match self.branch_var(&x) {
            None => self.polish(&tab, &x),
            Some(j) => {
                let warm = self.warm_parents * tab.size_bytes() < WARM_START_BYTES;
                let parent = warm.then(|| Rc::new(tab));
                if warm {
                    self.warm_parents += 1;
                }
                // down branch first so it wins ties
                for v in [0.0, 1.0] {
                    let mut f = fixings.clone();
                    f.push((j, v));
                    self.seq += 1;
                    self.heap.push(Node { bound: obj, seq: self.seq, parent: parent.clone(), fixings: f });
                }
                Ok(())
            }
        }
    }

    /// Fixes every binary at its rounded value and re-solves the continuous
    /// part so the incumbent is exactly integral.
    fn polish(&mut self, tab: &Tableau, x: &[f64]) -> Result<(), MilpError> {
        let mut t = tab.clone();
        for &j in &self.binaries {
            let v = libm::round(x[j]);
            t.set_bounds(j, v, v);
        }
        let mut out = t.solve();
        if out != LpOutcome::Optimal {
            let fix: Vec<(usize, f64)> = self.binaries.iter().map(|&j| (j, libm::round(x[j]))).collect();
            let (t2, o2) = self.cold(&fix);
            t = t2;
            out = o2;
        }
        if out != LpOutcome::Optimal {
            return Ok(());
        }
        let mut vals = t.x();
        for &j in &self.binaries {
            vals[j] = libm::round(vals[j]);
        }
        if self.model.max_violation(&vals) > self.cfg.feasibility_tolerance {
            return Ok(());
        }
        let obj = self.model.objective.eval(&vals) - self.model.objective.constant;
        if self.incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc - self.gap(*inc)) {
            self.incumbent = Some((obj, vals));
        }
        Ok(())
    }
}

pub(super) fn solve_impl(model: &MilpModel, cfg: &SolverConfig) -> Result<SolveResult, MilpError> {
    model.validate()?;
    let start = cfg.clock.map(|c| c());
    let elapsed = |start: Option<Duration>| -> Option<Duration> { Some(cfg.clock?() - start?) };
    let lp = match presolve(model, cfg) {
        Presolved::Infeasible => return Ok(SolveResult::without_solution(SolveStatus::Infeasible, 0, f64::INFINITY)),
        Presolved::Ready(lp) => lp,
    };
    let binaries = (0..model.vars.len()).filter(|&j| model.vars[j].kind == VarKind::Binary).collect();
    let mut root = Tableau::new(&lp);
    match root.solve() {
        LpOutcome::Optimal => {}
        LpOutcome::Infeasible => {
            return Ok(SolveResult::without_solution(SolveStatus::Infeasible, 1, f64::INFINITY));
        }
        LpOutcome::Unbounded => {
            return Ok(SolveResult::without_solution(SolveStatus::Unbounded, 1, f64::NEG_INFINITY));
        }
        LpOutcome::Stalled => return Err(MilpError::Numerical("root relaxation did not converge")),
    }
    let root_bound = root.objective() + model.objective.constant;
    let mut s = Search {
        model,
        cfg,
        lp,
        binaries,
        heap: BinaryHeap::new(),
        seq: 0,
        incumbent: None,
        warm_parents: 0,
    };
    s.process(root, Vec::new())?;
    let mut nodes = 1usize;
    let mut status = SolveStatus::Optimal;
    while let Some(node) = s.heap.pop() {
        if s.pruned(node.bound) {
            break;
        }
        if cfg.node_limit.is_some_and(|l| nodes >= l) {
            status = SolveStatus::NodeLimit;
            break;
        }
        if let (Some(limit), Some(e)) = (cfg.time_limit, elapsed(start)) {
            if e >= limit {
                status = SolveStatus::TimeLimit;
                break;
            }
        }
        nodes += 1;
        let Node { parent, fixings, .. } = node;
        let (tab, out) = match parent {
            Some(p) => {
                let mut t = match Rc::try_unwrap(p) {
                    Ok(t) => {
                        s.warm_parents -= 1;
                        t
                    }
                    Err(rc) => (*rc).clone(),
                };
                let (j, v) = *fixings.last().expect("child node has a fixing");
                t.set_bounds(j, v, v);
                let out = t.solve();
                if out == LpOutcome::Stalled { s.cold(&fixings) } else { (t, out) }
            }
            None => s.cold(&fixings),
        };
        match out {
            LpOutcome::Optimal => s.process(tab, fixings)?,
            LpOutcome::Infeasible | LpOutcome::Unbounded => {}
            LpOutcome::Stalled => return Err(MilpError::Numerical("node relaxation did not converge")),
        }
    }
    let constant = model.objective.constant;
    match s.incumbent {
        Some((obj, values)) => {
            if model.max_violation(&values) > cfg.feasibility_tolerance {
                return Err(MilpError::Numerical("incumbent violates constraints"));
            }
            Ok(SolveResult { status, values, objective: obj + constant, nodes, root_bound })
        }
        None => {
            let status = if status == SolveStatus::Optimal { SolveStatus::Infeasible } else { status };
            Ok(SolveResult::without_solution(status, nodes, root_bound))
        }
    }
}
