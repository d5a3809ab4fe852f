//! Receding-horizon controller: per-step MILP assembly, output history,
//! constraint softening and disturbed closed-loop simulation.

mod sampling;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

use crate::linsys::{
    build_flow_matrices, robust_prediction, uncertainty_offset, ControlSet, DisturbanceModel, FlowMatrices,
    LinsysError, SystemModel,
};
use crate::milp::{self, LinExpr, MilpError, MilpModel, Sense, SolveStatus, SolverConfig, StlEncoder, VarId, VarKind};
use crate::stl::{monitor, robustness_signal, to_pnf, Formula, SignalTrace, StlError};
use crate::Matrix;

pub use sampling::{sampler_for, ConvexCombination, DisturbanceSource, Replay, UniformBox, ZeroDisturbance};

/// Safety factor applied to the interval bound on the softened outputs.
const BIG_M_FACTOR: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MpcError {
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error("step {step}: {source}")]
    Solver { step: usize, source: MilpError },
    #[error("step {step}: softened problem reported {status:?}")]
    NoPlan { step: usize, status: SolveStatus },
    #[error("history does not cover time {0}")]
    MissingHistory(usize),
    #[error("invalid controller configuration: {0}")]
    Config(&'static str),
}

#[derive(Clone, Debug)]
pub struct ControllerConfig {
    pub prediction_horizon: usize,
    /// Weight of the slack in the objective.
    pub penalty: f64,
    /// Per-input weights of `|u|`; empty means all ones.
    pub control_weights: Vec<f64>,
    /// Per-state weights of `|x̂ - reference|`; empty means no state cost.
    pub state_weights: Vec<f64>,
    /// Empty means the origin.
    pub reference: Vec<f64>,
    /// Per-output slack weights; empty means all ones.
    pub softening_weights: Vec<f64>,
    /// Upper bound of the slack, derived per step when `None`.
    pub zeta_max: Option<f64>,
    /// Lets the slack go negative, rewarding margin.
    pub tightening: bool,
    /// With `D = 0`, skip the already decided oldest window constraint and
    /// the last control.
    pub d_zero_reduction: bool,
    /// `false` predicts with zero disturbance (nominal controller).
    pub robust: bool,
    pub solver: SolverConfig,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            prediction_horizon: 0,
            penalty: 1e5,
            control_weights: Vec::new(),
            state_weights: Vec::new(),
            reference: Vec::new(),
            softening_weights: Vec::new(),
            zeta_max: None,
            tightening: false,
            d_zero_reduction: false,
            robust: true,
            solver: SolverConfig::default(),
        }
    }
}

/// Last `capacity` output samples, time-contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryBuffer {
    capacity: usize,
    start: usize,
    samples: VecDeque<Vec<f64>>,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, start: 0, samples: VecDeque::with_capacity(capacity) }
    }

    /// Appends the sample for the next time, evicting the oldest when full.
    pub fn push(&mut self, y: Vec<f64>) {
        if self.capacity == 0 {
            self.start += 1;
            return;
        }
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
            self.start += 1;
        }
        self.samples.push_back(y);
    }

    pub fn get(&self, time: usize) -> Option<&[f64]> {
        self.samples.get(time.checked_sub(self.start)?).map(Vec::as_slice)
    }

    /// Time of the next sample to be pushed.
    pub fn next_time(&self) -> usize {
        self.start + self.samples.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub applied: Vec<f64>,
    /// Controls `u[t..]` of the optimal plan.
    pub plan: Vec<Vec<f64>>,
    pub zeta: f64,
    pub objective: f64,
    pub status: SolveStatus,
    /// First time whose robustness is constrained.
    pub window_start: usize,
    /// Robustness of the unsoftened composed signal at each window time.
    pub window_robustness: Vec<f64>,
    /// History followed by the worst-case prediction, from `window_start`.
    pub composed: SignalTrace,
    pub nodes: usize,
    pub binaries: usize,
    pub big_m: f64,
}

impl StepResult {
    /// Smallest uniform softening that satisfies the window, see
    /// [`compute_zeta_min`].
    pub fn zeta_min(&self) -> f64 {
        zeta_from_robustness(&self.window_robustness)
    }
}

fn zeta_from_robustness(rho: &[f64]) -> f64 {
    rho.iter().fold(0.0f64, |z, r| z.max(-r))
}

/// `max(0, -min rho[τ])` over `times` (indices into `composed`).
///
/// For a negation-free formula this is the least `ζ` such that adding `ζ`
/// to every output satisfies the formula at every time in `times`.
pub fn compute_zeta_min(f: &Formula, composed: &SignalTrace, times: Range<usize>) -> Result<f64, StlError> {
    let sig = robustness_signal(f, composed)?;
    if times.end > sig.len() {
        return Err(StlError::TraceTooShort { needed: times.end + f.horizon(), available: composed.len() });
    }
    Ok(zeta_from_robustness(&sig[times]))
}

/// Per-problem data shared by every step.
#[derive(Clone, Debug)]
pub struct Planner {
    original: SystemModel,
    model: SystemModel,
    /// Formula as given, over the original rows.
    source: Formula,
    formula: Formula,
    dist: DisturbanceModel,
    cset: ControlSet,
    cfg: ControllerConfig,
    formula_horizon: usize,
    span: usize,
    flow: FlowMatrices,
    offset: Vec<f64>,
    /// `A^k` for `k = 0..=span`.
    powers: Vec<Matrix>,
    reduced: bool,
}

impl Planner {
    /// Rewrites `formula` into positive normal form (extending the output
    /// map when needed) and precomputes the prediction matrices.
    pub fn new(
        model: &SystemModel,
        dist: &DisturbanceModel,
        cset: &ControlSet,
        formula: &Formula,
        cfg: ControllerConfig,
    ) -> Result<Self, MpcError> {
        let (n, m) = (model.n(), model.m());
        if dist.n() != n {
            return Err(LinsysError::Dimension { what: "disturbance", expected: n, found: dist.n() }.into());
        }
        if cset.lower.len() != m {
            return Err(LinsysError::Dimension { what: "control set", expected: m, found: cset.lower.len() }.into());
        }
        if !(cfg.penalty > 0.0 && cfg.penalty.is_finite()) {
            return Err(MpcError::Config("penalty must be positive"));
        }
        let check_len = |v: &[f64], len: usize, what| {
            if v.is_empty() || v.len() == len { Ok(()) } else { Err(MpcError::Config(what)) }
        };
        check_len(&cfg.control_weights, m, "control weights must have one entry per input")?;
        check_len(&cfg.state_weights, n, "state weights must have one entry per state")?;
        check_len(&cfg.reference, n, "reference must have one entry per state")?;
        check_len(&cfg.softening_weights, model.p(), "softening weights must have one entry per output")?;
        if cfg.softening_weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(MpcError::Config("softening weights must be positive"));
        }
        if cfg.zeta_max.is_some_and(|z| !(z > 0.0 && z.is_finite())) {
            return Err(MpcError::Config("slack bound must be positive"));
        }
        cfg.solver.validate().map_err(|source| MpcError::Solver { step: 0, source })?;
        let mut err = None;
        formula.visit_predicates(&mut |i, _| {
            if i >= model.p() && err.is_none() {
                err = Some(StlError::WidthMismatch { predicate: i, width: model.p() });
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }

        let (pnf, outputs) = to_pnf(formula, model.outputs());
        let mut cfg = cfg;
        if !cfg.softening_weights.is_empty() {
            // appended rows inherit the weight of the row they negate
            cfg.softening_weights = outputs
                .origin
                .iter()
                .map(|o| match o {
                    crate::stl::RowOrigin::Original(k) | crate::stl::RowOrigin::Negated(k) => {
                        cfg.softening_weights[*k]
                    }
                })
                .collect();
        }
        let pmodel = model.with_output_map(outputs)?;
        let formula_horizon = pnf.horizon();
        let span = formula_horizon + cfg.prediction_horizon;
        let flow = build_flow_matrices(&pmodel, span);
        let offset = if cfg.robust { uncertainty_offset(&pmodel, dist, span) } else { vec![0.0; (span + 1) * pmodel.p()] };
        let mut powers = vec![Matrix::identity(n)];
        for k in 0..span {
            let next = powers[k].mul(model.a());
            powers.push(next);
        }
        let reduced = cfg.d_zero_reduction && model.d().is_zero();
        Ok(Self {
            original: model.clone(),
            model: pmodel,
            source: formula.clone(),
            formula: pnf,
            dist: dist.clone(),
            cset: cset.clone(),
            cfg,
            formula_horizon,
            span,
            flow,
            offset,
            powers,
            reduced,
        })
    }

    /// The negation-free formula the planner enforces.
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// System whose outputs match [`Planner::formula`].
    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn formula_horizon(&self) -> usize {
        self.formula_horizon
    }

    /// `H = h^φ + h_p`.
    pub fn span(&self) -> usize {
        self.span
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn new_history(&self) -> HistoryBuffer {
        HistoryBuffer::new(self.formula_horizon + 1)
    }

    /// Constrained robustness times at step `t`.
    pub fn window(&self, t: usize) -> Range<usize> {
        let first = if self.reduced { (t + 1).saturating_sub(self.formula_horizon) } else { t.saturating_sub(self.formula_horizon) };
        first..t + self.cfg.prediction_horizon + 1
    }

    fn control_count(&self) -> usize {
        if self.reduced { self.span } else { self.span + 1 }
    }

    fn softening_weight(&self, i: usize) -> f64 {
        self.cfg.softening_weights.get(i).copied().unwrap_or(1.0)
    }

    /// Builds the step-`t` model. Returns it with the control and slack
    /// variables and the big-M constant used.
    pub fn build_model(&self, x: &[f64], hist: &HistoryBuffer, t: usize) -> Result<StepModel, MpcError> {
        let (n, m, p) = (self.model.n(), self.model.m(), self.model.p());
        if x.len() != n {
            return Err(LinsysError::Dimension { what: "state", expected: n, found: x.len() }.into());
        }
        let window = self.window(t);
        // with D = 0 the final control reaches only its own cost term
        let inert_last = self.model.d().is_zero() && self.cset.inequalities.is_empty();
        let mut mdl = MilpModel::new();
        let controls: Vec<Vec<VarId>> = (0..self.control_count())
            .map(|k| {
                (0..m)
                    .map(|j| {
                        let (mut lo, mut hi) = (self.cset.lower[j], self.cset.upper[j]);
                        if inert_last && k == self.span {
                            lo = 0.0f64.clamp(lo, hi);
                            hi = lo;
                        }
                        mdl.add_var(alloc::format!("u{}_{}", j + 1, t + k), VarKind::Continuous, lo, hi)
                    })
                    .collect()
            })
            .collect();
        for u in &controls {
            for (coeffs, rhs) in &self.cset.inequalities {
                let e = LinExpr::from_terms(u.iter().zip(coeffs).map(|(v, c)| (*v, *c)));
                mdl.add_constraint(e, Sense::Le, *rhs);
            }
        }

        // outputs without the slack, history first
        // starts at the unreduced window so both variants size K and the
        // slack bound identically
        let first = t.saturating_sub(self.formula_horizon);
        let mut outputs: Vec<Vec<LinExpr>> = Vec::new();
        for time in first..t {
            let y = hist.get(time).ok_or(MpcError::MissingHistory(time))?;
            outputs.push(y.iter().map(|v| LinExpr::constant(*v)).collect());
        }
        let free = self.flow.phi0.mul_vec(x);
        for k in 0..=self.span {
            let mut row = Vec::with_capacity(p);
            for i in 0..p {
                let r = k * p + i;
                let mut e = LinExpr::constant(free[r] + self.offset[r] + self.model.e()[i]);
                for (kk, u) in controls.iter().enumerate().take(k + 1) {
                    for (j, v) in u.iter().enumerate() {
                        let c = self.flow.phi1[(r, kk * m + j)];
                        if c != 0.0 {
                            e.add_term(*v, c);
                        }
                    }
                }
                row.push(e);
            }
            outputs.push(row);
        }

        // slack bound: enough to lift every output to zero
        let mut zeta_max = self.cfg.zeta_max.unwrap_or(0.0);
        if self.cfg.zeta_max.is_none() {
            for row in &outputs {
                for (i, e) in row.iter().enumerate() {
                    let (lo, _) = e.range(&mdl);
                    zeta_max = zeta_max.max(-lo / self.softening_weight(i));
                }
            }
            zeta_max += 1.0;
        }
        if !zeta_max.is_finite() {
            return Err(MpcError::Config("control set must be bounded to size the slack"));
        }
        let zeta_lo = if self.cfg.tightening { -zeta_max } else { 0.0 };
        let zeta = mdl.add_var("zeta", VarKind::Continuous, zeta_lo, zeta_max);
        for row in outputs.iter_mut() {
            for (i, e) in row.iter_mut().enumerate() {
                e.add_term(zeta, self.softening_weight(i));
            }
        }
        let big_m = match self.cfg.solver.big_m {
            Some(k) => k,
            None => {
                let mut bound = 0.0f64;
                for row in &outputs {
                    for e in row {
                        let (lo, hi) = e.range(&mdl);
                        bound = bound.max(lo.abs()).max(hi.abs());
                    }
                }
                if !bound.is_finite() {
                    return Err(MpcError::Config("control set must be bounded to size big-M"));
                }
                (BIG_M_FACTOR * bound).max(1.0)
            }
        };

        let mut enc =
            StlEncoder::new(&self.formula, first, outputs, big_m).map_err(|source| MpcError::Solver { step: t, source })?;
        let mut roots = Vec::with_capacity(window.len());
        // the oldest time last, so the reduced model is a prefix of the full one
        let mut times: Vec<usize> = window.clone().collect();
        if times.len() > 1 && times[0] + self.formula_horizon == t {
            times.rotate_left(1);
        }
        for tau in times {
            roots.push(enc.root(&mut mdl, tau).map_err(|source| MpcError::Solver { step: t, source })?);
        }
        milp::assert_window(&mut mdl, &roots);
        let binaries = enc.finish().binary_count();

        // stage cost on controls and nominal states
        let mut objective = LinExpr::new();
        for (k, u) in controls.iter().enumerate() {
            for (j, v) in u.iter().enumerate() {
                let w = self.cfg.control_weights.get(j).copied().unwrap_or(1.0);
                let var = mdl.var(*v);
                if w != 0.0 && var.lower == var.upper {
                    objective.add_constant(w * var.lower.abs());
                } else if w != 0.0 {
                    let a = abs_var(&mut mdl, alloc::format!("cu{}_{}", j + 1, t + k), &LinExpr::var(*v));
                    objective.add_term(a, w);
                }
            }
        }
        if !self.cfg.state_weights.is_empty() {
            for k in 0..=self.span {
                let xs = self.nominal_state_expr(x, &controls, k);
                for (i, mut e) in xs.into_iter().enumerate() {
                    let w = self.cfg.state_weights[i];
                    if w == 0.0 {
                        continue;
                    }
                    e.add_constant(-self.cfg.reference.get(i).copied().unwrap_or(0.0));
                    let a = abs_var(&mut mdl, alloc::format!("cx{}_{}", i + 1, t + k), &e);
                    objective.add_term(a, w);
                }
            }
        }
        objective.add_term(zeta, self.cfg.penalty);
        mdl.set_objective(objective);
        Ok(StepModel { model: mdl, controls, zeta, big_m, binaries, window })
    }

    /// Nominal state `x̂[t+k]` as an affine expression of the controls.
    fn nominal_state_expr(&self, x: &[f64], controls: &[Vec<VarId>], k: usize) -> Vec<LinExpr> {
        let n = self.model.n();
        let mut out: Vec<LinExpr> = self.powers[k].mul_vec(x).into_iter().map(LinExpr::constant).collect();
        for j in 0..k {
            let pw = &self.powers[k - 1 - j];
            let shift = pw.mul_vec(self.dist.nominal());
            let gain = pw.mul(self.model.b());
            for i in 0..n {
                out[i].add_constant(shift[i]);
                if let Some(u) = controls.get(j) {
                    for (l, v) in u.iter().enumerate() {
                        if gain[(i, l)] != 0.0 {
                            out[i].add_term(*v, gain[(i, l)]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Solves the step-`t` problem for state `x` given outputs before `t`.
    pub fn plan_step(&self, x: &[f64], hist: &HistoryBuffer, t: usize) -> Result<StepResult, MpcError> {
        let sm = self.build_model(x, hist, t)?;
        let res = milp::solve(&sm.model, &self.cfg.solver).map_err(|source| MpcError::Solver { step: t, source })?;
        if !res.has_solution() {
            return Err(MpcError::NoPlan { step: t, status: res.status });
        }
        let m = self.model.m();
        let mut plan: Vec<Vec<f64>> = sm.controls.iter().map(|u| u.iter().map(|v| res.value(*v)).collect()).collect();
        let zeta = res.value(sm.zeta);

        let mut stacked: Vec<f64> = plan.iter().flatten().copied().collect();
        stacked.resize((self.span + 1) * m, 0.0);
        let predicted = robust_prediction(&self.model, &self.flow, x, &stacked, &self.offset);
        let p = self.model.p();
        let mut composed = SignalTrace::new(p);
        for time in sm.window.start..t {
            composed.push(hist.get(time).ok_or(MpcError::MissingHistory(time))?);
        }
        for k in 0..=self.span {
            composed.push(&predicted[k * p..(k + 1) * p]);
        }
        let window_robustness = robustness_signal(&self.formula, &composed)?;
        debug_assert_eq!(window_robustness.len(), sm.window.len());
        if plan.is_empty() {
            plan.push(vec![0.0; m]);
        }
        Ok(StepResult {
            applied: plan[0].clone(),
            plan,
            zeta,
            objective: res.objective,
            status: res.status,
            window_start: sm.window.start,
            window_robustness,
            composed,
            nodes: res.nodes,
            binaries: sm.binaries,
            big_m: sm.big_m,
        })
    }

    /// Runs `steps` closed-loop steps from `x0`.
    pub fn run_closed_loop(
        &self,
        x0: &[f64],
        steps: usize,
        source: &mut dyn DisturbanceSource,
    ) -> Result<ClosedLoopTrace, MpcError> {
        self.run_with(x0, steps, source, |_, _| {})
    }

    /// [`Planner::run_closed_loop`] with a callback after every step.
    pub fn run_with(
        &self,
        x0: &[f64],
        steps: usize,
        source: &mut dyn DisturbanceSource,
        mut observe: impl FnMut(usize, &StepResult),
    ) -> Result<ClosedLoopTrace, MpcError> {
        if steps == 0 {
            return Err(MpcError::Config("at least one step is required"));
        }
        let n = self.model.n();
        if x0.len() != n {
            return Err(LinsysError::Dimension { what: "initial state", expected: n, found: x0.len() }.into());
        }
        let mut hist = self.new_history();
        let mut x = x0.to_vec();
        let mut records = Vec::with_capacity(steps);
        let mut outputs = SignalTrace::new(self.original.p());
        for t in 0..steps {
            let step = self.plan_step(&x, &hist, t)?;
            observe(t, &step);
            let u = step.applied.clone();
            let w = source.sample(t);
            if w.len() != n {
                return Err(LinsysError::Dimension { what: "sampled disturbance", expected: n, found: w.len() }.into());
            }
            let y = self.original.output(&x, &u);
            hist.push(self.model.output(&x, &u));
            outputs.push(&y);
            let next = self.original.step(&x, &u, &w);
            records.push(StepRecord {
                t,
                x: core::mem::replace(&mut x, next),
                u,
                w,
                y,
                zeta: step.zeta,
                zeta_min: step.zeta_min(),
                objective: step.objective,
                status: step.status,
                nodes: step.nodes,
            });
        }
        let robustness = if outputs.len() > self.formula_horizon { monitor(&self.source, &outputs)? } else { Vec::new() };
        Ok(ClosedLoopTrace { records, final_state: x, robustness })
    }
}

/// Step-`t` optimization model with handles to its decision variables.
#[derive(Clone, Debug)]
pub struct StepModel {
    pub model: MilpModel,
    pub controls: Vec<Vec<VarId>>,
    pub zeta: VarId,
    pub big_m: f64,
    pub binaries: usize,
    pub window: Range<usize>,
}

fn abs_var(mdl: &mut MilpModel, name: alloc::string::String, e: &LinExpr) -> VarId {
    let a = mdl.add_var(name, VarKind::Continuous, 0.0, f64::INFINITY);
    let mut up = LinExpr::var(a);
    up.add_scaled(e, -1.0);
    mdl.add_constraint(up, Sense::Ge, 0.0);
    let mut down = LinExpr::var(a);
    down.add_scaled(e, 1.0);
    mdl.add_constraint(down, Sense::Ge, 0.0);
    a
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    /// Outputs over the rows the caller declared.
    pub y: Vec<f64>,
    pub zeta: f64,
    /// Least softening for the optimal plan's composed signal.
    pub zeta_min: f64,
    pub objective: f64,
    pub status: SolveStatus,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedLoopTrace {
    pub records: Vec<StepRecord>,
    pub final_state: Vec<f64>,
    /// Realized robustness `rho[t]` for every `t + h <= N - 1`.
    pub robustness: Vec<f64>,
}

impl ClosedLoopTrace {
    pub fn outputs(&self) -> SignalTrace {
        let width = self.records.first().map_or(0, |r| r.y.len());
        let mut tr = SignalTrace::new(width);
        for r in &self.records {
            tr.push(&r.y);
        }
        tr
    }

    pub fn min_robustness(&self) -> Option<f64> {
        self.robustness.iter().copied().reduce(f64::min)
    }

    pub fn max_zeta(&self) -> f64 {
        self.records.iter().fold(0.0, |z, r| z.max(r.zeta))
    }

    pub fn total_cost(&self) -> f64 {
        self.records.iter().map(|r| r.objective).sum()
    }
}

/// Robustness series of `f` over a recorded trace.
pub fn monitor_trace(f: &Formula, trace: &SignalTrace) -> Result<Vec<f64>, StlError> {
    monitor(f, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::parse;

    fn case_study() -> SystemModel {
        SystemModel::new(
            Matrix::from_rows(&[[1.0, 0.5], [0.0, 0.8]]).unwrap(),
            Matrix::from_rows(&[[0.0], [1.0]]).unwrap(),
            Matrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0], [-1.0, 0.0], [1.0, 0.0]]).unwrap(),
            Matrix::zeros(4, 1),
            vec![-2.0, 4.0, -2.0, 4.0],
        )
        .unwrap()
    }

    fn planner(hp: usize, w0: f64, bound: f64) -> Planner {
        let f = parse("F[0,4](p1 & p2) & F[0,4](p3 & p4)").unwrap();
        let cfg = ControllerConfig { prediction_horizon: hp, ..Default::default() };
        let dist = DisturbanceModel::from_box(2, w0).unwrap();
        Planner::new(&case_study(), &dist, &ControlSet::symmetric(1, bound), &f, cfg).unwrap()
    }

    #[test]
    fn history_is_contiguous_and_bounded() {
        let mut h = HistoryBuffer::new(3);
        for t in 0..5 {
            h.push(vec![t as f64]);
        }
        assert_eq!(h.len(), 3);
        assert_eq!(h.next_time(), 5);
        assert_eq!(h.get(1), None);
        assert_eq!(h.get(2), Some(&[2.0][..]));
        assert_eq!(h.get(4), Some(&[4.0][..]));
        assert_eq!(h.get(5), None);
    }

    #[test]
    fn zeta_min_examples() {
        let f = parse("p1").unwrap();
        let tr = SignalTrace::from_samples(1, &[[0.5], [-0.7], [0.1]]).unwrap();
        assert_eq!(compute_zeta_min(&f, &tr, 0..1).unwrap(), 0.0);
        assert_eq!(compute_zeta_min(&f, &tr, 0..3).unwrap(), 0.7);
        assert!(compute_zeta_min(&f, &tr, 0..4).is_err());
    }

    #[test]
    fn window_truncates_at_startup() {
        let p = planner(2, 0.0, 20.0);
        assert_eq!(p.span(), 6);
        assert_eq!(p.window(0), 0..3);
        assert_eq!(p.window(2), 0..5);
        assert_eq!(p.window(4), 0..7);
        assert_eq!(p.window(9), 5..12);
    }

    #[test]
    fn first_step_of_deterministic_case() {
        let p = planner(2, 0.0, 20.0);
        let s = p.plan_step(&[0.0, 0.0], &p.new_history(), 0).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(s.zeta.abs() < 1e-9);
        assert!(s.window_robustness.iter().all(|r| *r >= -1e-6));
        assert_eq!(s.plan.len(), 7);
        // 4 rows over times 0..=6 at startup
        assert_eq!(s.binaries, 28);
    }

    #[test]
    fn full_window_has_paper_binary_count() {
        let p = planner(2, 0.0, 20.0);
        let mut h = p.new_history();
        for _ in 0..4 {
            h.push(vec![0.0, 4.0, 0.0, 4.0]);
        }
        let sm = p.build_model(&[2.0, 0.0], &h, 4).unwrap();
        assert_eq!(sm.window, 0..7);
        assert_eq!(sm.binaries, 44);
        assert_eq!(sm.model.num_binaries(), 44);
    }

    #[test]
    fn trivially_true_formula_costs_nothing() {
        let m = SystemModel::new(
            Matrix::identity(1),
            Matrix::identity(1),
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
            vec![1e3],
        )
        .unwrap();
        let cfg = ControllerConfig { prediction_horizon: 1, ..Default::default() };
        let p = Planner::new(&m, &DisturbanceModel::none(1), &ControlSet::symmetric(1, 5.0), &parse("p1").unwrap(), cfg)
            .unwrap();
        let s = p.plan_step(&[0.0], &p.new_history(), 0).unwrap();
        assert_eq!(s.zeta, 0.0);
        assert_eq!(s.objective, 0.0);
        assert!(s.plan.iter().flatten().all(|u| *u == 0.0));
    }

    #[test]
    fn negated_formula_is_rewritten() {
        // G !(x1 >= 3) over a single integrator pushed upward
        let m = SystemModel::new(
            Matrix::identity(1),
            Matrix::identity(1),
            Matrix::identity(1),
            Matrix::zeros(1, 1),
            vec![-3.0],
        )
        .unwrap();
        let cfg = ControllerConfig { prediction_horizon: 2, ..Default::default() };
        let f = parse("!F[0,2] p1").unwrap();
        let p = Planner::new(&m, &DisturbanceModel::none(1), &ControlSet::symmetric(1, 1.0), &f, cfg).unwrap();
        assert!(p.formula().is_negation_free());
        let tr = p.run_closed_loop(&[2.5], 6, &mut ZeroDisturbance::new(1)).unwrap();
        assert!(tr.robustness.iter().all(|r| *r >= -1e-9));
        assert!(tr.records.iter().all(|r| r.x[0] <= 3.0 + 1e-9));
    }

    #[test]
    fn rejects_bad_configuration() {
        let f = parse("p1").unwrap();
        let m = case_study();
        let d = DisturbanceModel::none(2);
        let c = ControlSet::symmetric(1, 1.0);
        let bad = ControllerConfig { penalty: 0.0, ..Default::default() };
        assert!(matches!(Planner::new(&m, &d, &c, &f, bad), Err(MpcError::Config(_))));
        let bad = ControllerConfig { control_weights: vec![1.0, 2.0], ..Default::default() };
        assert!(matches!(Planner::new(&m, &d, &c, &f, bad), Err(MpcError::Config(_))));
        let wide = parse("p5").unwrap();
        assert!(matches!(Planner::new(&m, &d, &c, &wide, ControllerConfig::default()), Err(MpcError::Stl(_))));
    }
}
