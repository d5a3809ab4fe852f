//! Dense bounded-variable simplex on the tableau of `A x - r = 0`, where the
//! row activities `r` carry the constraint bounds.

use alloc::vec;
use alloc::vec::Vec;

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 40;

/// LP in row-activity form.
#[derive(Clone, Debug)]
pub(crate) struct LpData {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub row_lo: Vec<f64>,
    pub row_hi: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable resting at zero.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
    Stalled,
}

#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    m: usize,
    n: usize,
    cols: usize,
    /// `B^-1 [A, -I]`, row-major `m x cols`.
    a: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    status: Vec<Status>,
    beta: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    iter_limit: usize,
}

impl Tableau {
    pub fn new(lp: &LpData) -> Self {
        let (m, n) = (lp.rows.len(), lp.n);
        let cols = n + m;
        let mut a = vec![0.0; m * cols];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, v) in row {
                a[i * cols + j] -= v;
            }
            a[i * cols + n + i] = 1.0;
        }
        let mut lb = lp.lower.clone();
        lb.extend_from_slice(&lp.row_lo);
        let mut ub = lp.upper.clone();
        ub.extend_from_slice(&lp.row_hi);
        let mut cost = lp.cost.clone();
        cost.resize(cols, 0.0);
        let mut status = vec![Status::Lower; cols];
        let mut row_of = vec![usize::MAX; cols];
        for i in 0..m {
            status[n + i] = Status::Basic;
            row_of[n + i] = i;
        }
        for j in 0..n {
            status[j] = rest_status(lb[j], ub[j], cost[j]);
        }
        let mut t = Tableau {
            m,
            n,
            cols,
            a,
            basis: (n..cols).collect(),
            row_of,
            status,
            beta: vec![0.0; m],
            lb,
            ub,
            d: cost.clone(),
            cost,
            iter_limit: 5000 + 40 * (m + cols),
        };
        t.recompute_beta();
        t
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::Lower => self.lb[j],
            Status::Upper => self.ub[j],
            Status::Zero | Status::Basic => 0.0,
        }
    }

    pub fn value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::Basic => self.beta[self.row_of[j]],
            _ => self.nonbasic_value(j),
        }
    }

    /// Structural variable values.
    pub fn x(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.value(j)).collect()
    }

    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.value(j)).sum()
    }

    fn recompute_beta(&mut self) {
        let cols = self.cols;
        for i in 0..self.m {
            let row = &self.a[i * cols..(i + 1) * cols];
            let mut s = 0.0;
            for j in 0..cols {
                if self.status[j] != Status::Basic && row[j] != 0.0 {
                    s -= row[j] * self.nonbasic_value(j);
                }
            }
            self.beta[i] = s;
        }
    }

    fn recompute_duals(&mut self) {
        let cols = self.cols;
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * cols..(i + 1) * cols];
                for (dj, aij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    /// Tightens or relaxes the bounds of variable `j`, keeping nonbasic
    /// variables on a bound.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lb[j] = lo;
        self.ub[j] = hi;
        if self.status[j] == Status::Basic {
            return;
        }
        let old = self.nonbasic_value(j);
        self.status[j] = match self.status[j] {
            Status::Upper if hi.is_finite() && lo != hi => Status::Upper,
            Status::Lower if lo.is_finite() => Status::Lower,
            _ => rest_status(lo, hi, self.d[j]),
        };
        let delta = self.nonbasic_value(j) - old;
        if delta != 0.0 {
            let cols = self.cols;
            for i in 0..self.m {
                self.beta[i] -= self.a[i * cols + j] * delta;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let inv = 1.0 / self.a[r * cols + q];
        let (head, rest) = self.a.split_at_mut(r * cols);
        let (prow, tail) = rest.split_at_mut(cols);
        for v in prow.iter_mut() {
            *v *= inv;
        }
        prow[q] = 1.0;
        for row in head.chunks_exact_mut(cols).chain(tail.chunks_exact_mut(cols)) {
            let f = row[q];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (x, p) in self.d.iter_mut().zip(prow.iter()) {
                *x -= dq * p;
            }
        }
        self.d[q] = 0.0;
        let leaving = self.basis[r];
        self.row_of[leaving] = usize::MAX;
        self.basis[r] = q;
        self.row_of[q] = r;
        self.status[q] = Status::Basic;
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lb[j] == self.ub[j]
    }

    fn dual_feasible(&self) -> bool {
        (0..self.cols).all(|j| match self.status[j] {
            Status::Basic => true,
            _ if self.is_fixed(j) => true,
            Status::Lower => self.d[j] >= -DUAL_TOL,
            Status::Upper => self.d[j] <= DUAL_TOL,
            Status::Zero => self.d[j].abs() <= DUAL_TOL,
        })
    }

    fn primal_infeasibility(&self) -> f64 {
        (0..self.m)
            .map(|i| {
                let b = self.basis[i];
                (self.lb[b] - self.beta[i]).max(self.beta[i] - self.ub[b]).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Solves from the current basis.
    pub fn solve(&mut self) -> LpOutcome {
        for _ in 0..4 {
            let out = if self.dual_feasible() { self.dual() } else { self.primal() };
            if out != LpOutcome::Optimal {
                return out;
            }
            self.recompute_beta();
            self.recompute_duals();
            if self.primal_infeasibility() <= PRIMAL_TOL && self.dual_feasible() {
                return LpOutcome::Optimal;
            }
        }
        LpOutcome::Stalled
    }

    fn primal(&mut self) -> LpOutcome {
        let cols = self.cols;
        let mut bland = false;
        let mut streak = 0;
        let mut phase_cost = vec![0.0; cols];
        for _ in 0..self.iter_limit {
            let phase1 = self.primal_infeasibility() > PRIMAL_TOL;
            if phase1 {
                phase_cost.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..self.m {
                    let b = self.basis[i];
                    let w = if self.beta[i] > self.ub[b] + PRIMAL_TOL {
                        1.0
                    } else if self.beta[i] < self.lb[b] - PRIMAL_TOL {
                        -1.0
                    } else {
                        continue;
                    };
                    for (dj, aij) in phase_cost.iter_mut().zip(&self.a[i * cols..(i + 1) * cols]) {
                        *dj -= w * aij;
                    }
                }
            }
            let dd = if phase1 { &phase_cost } else { &self.d };

            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..cols {
                if self.status[j] == Status::Basic || self.is_fixed(j) {
                    continue;
                }
                let dir = match self.status[j] {
                    Status::Lower if dd[j] < -DUAL_TOL => 1.0,
                    Status::Upper if dd[j] > DUAL_TOL => -1.0,
                    Status::Zero if dd[j].abs() > DUAL_TOL => -dd[j].signum(),
                    _ => continue,
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if dd[j].abs() > best {
                    best = dd[j].abs();
                    enter = Some((j, dir));
                }
            }
            let Some((q, dir)) = enter else {
                return if phase1 { LpOutcome::Infeasible } else { LpOutcome::Optimal };
            };

            // ratio test
            let span = self.ub[q] - self.lb[q];
            let mut step = if span.is_finite() { span } else { f64::INFINITY };
            let mut leave: Option<(usize, Status)> = None;
            let mut leave_g = 0.0;
            for i in 0..self.m {
                let g = -self.a[i * cols + q] * dir;
                if g.abs() < PIVOT_TOL {
                    continue;
                }
                let b = self.basis[i];
                let v = self.beta[i];
                let (lo, hi) = (self.lb[b], self.ub[b]);
                let (limit, to) = if phase1 && v < lo - PRIMAL_TOL {
                    if g > 0.0 { ((lo - v) / g, Status::Lower) } else { continue }
                } else if phase1 && v > hi + PRIMAL_TOL {
                    if g < 0.0 { ((hi - v) / g, Status::Upper) } else { continue }
                } else if g > 0.0 && hi.is_finite() {
                    ((hi - v) / g, Status::Upper)
                } else if g < 0.0 && lo.is_finite() {
                    ((lo - v) / g, Status::Lower)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    None => limit < step,
                    Some((r, _)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            if bland { b < self.basis[r] } else { g.abs() > leave_g }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = limit;
                    leave = Some((i, to));
                    leave_g = g.abs();
                }
            }

            if step == f64::INFINITY {
                return if phase1 { LpOutcome::Stalled } else { LpOutcome::Unbounded };
            }
            if step <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
            let entering_value = self.nonbasic_value(q) + dir * step;
            for i in 0..self.m {
                let aiq = self.a[i * cols + q];
                if aiq != 0.0 {
                    self.beta[i] -= aiq * dir * step;
                }
            }
            match leave {
                None => {
                    self.status[q] = if dir > 0.0 { Status::Upper } else { Status::Lower };
                }
                Some((r, to)) => {
                    let b = self.basis[r];
                    self.status[b] = if self.is_fixed(b) { Status::Lower } else { to };
                    self.pivot(r, q);
                    self.beta[r] = entering_value;
                }
            }
        }
        LpOutcome::Stalled
    }

    fn dual(&mut self) -> LpOutcome {
        let cols = self.cols;
        let mut bland = false;
        let mut streak = 0;
        for _ in 0..self.iter_limit {
            let mut leave: Option<(usize, bool, f64)> = None;
            let mut worst = PRIMAL_TOL;
            for i in 0..self.m {
                let b = self.basis[i];
                let (over, under) = (self.beta[i] - self.ub[b], self.lb[b] - self.beta[i]);
                let (inf, down) = if over > under { (over, true) } else { (under, false) };
                if inf <= PRIMAL_TOL {
                    continue;
                }
                let take = if bland {
                    leave.is_none_or(|(r, _, _)| b < self.basis[r])
                } else {
                    inf > worst
                };
                if take {
                    worst = inf;
                    leave = Some((i, down, if down { self.ub[b] } else { self.lb[b] }));
                }
            }
            let Some((r, down, target)) = leave else {
                return LpOutcome::Optimal;
            };

            let row = &self.a[r * cols..(r + 1) * cols];
            let mut enter: Option<(usize, f64)> = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for j in 0..cols {
                let arj = row[j];
                if self.status[j] == Status::Basic || self.is_fixed(j) || arj.abs() < PIVOT_TOL {
                    continue;
                }
                // beta_r moves by -arj * dir * step; it must move toward target
                let want = if down { 1.0 } else { -1.0 };
                let dir = if arj * want > 0.0 { 1.0 } else { -1.0 };
                let ok = match self.status[j] {
                    Status::Lower => dir > 0.0,
                    Status::Upper => dir < 0.0,
                    Status::Zero => true,
                    Status::Basic => false,
                };
                if !ok {
                    continue;
                }
                let ratio = self.d[j].abs() / arj.abs();
                let better = if ratio < best_ratio - 1e-12 {
                    true
                } else if ratio <= best_ratio + 1e-12 {
                    if bland { enter.is_none_or(|(k, _)| j < k) } else { arj.abs() > best_alpha }
                } else {
                    false
                };
                if better {
                    best_ratio = ratio.min(best_ratio);
                    best_alpha = arj.abs();
                    enter = Some((j, dir));
                }
            }
            let Some((q, dir)) = enter else {
                return LpOutcome::Infeasible;
            };
            let arq = self.a[r * cols + q];
            let step = (target - self.beta[r]) / (-arq * dir);
            if best_ratio <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
            let entering_value = self.nonbasic_value(q) + dir * step;
            for i in 0..self.m {
                let aiq = self.a[i * cols + q];
                if aiq != 0.0 {
                    self.beta[i] -= aiq * dir * step;
                }
            }
            let b = self.basis[r];
            self.status[b] = if down && !self.is_fixed(b) { Status::Upper } else { Status::Lower };
            self.pivot(r, q);
            self.beta[r] = entering_value;
        }
        LpOutcome::Stalled
    }

    pub fn size_bytes(&self) -> usize {
        self.a.len() * 8 + self.cols * 48
    }
}

fn rest_status(lo: f64, hi: f64, cost: f64) -> Status {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            if cost < 0.0 && lo != hi {
                Status::Upper
            } else {
                Status::Lower
            }
        }
        (true, false) => Status::Lower,
        (false, true) => Status::Upper,
        (false, false) => Status::Zero,
    }
}
