//! Independent oracles and generators shared by the integration tests and
//! the acceptance suite.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stlmpc_core::linsys::SystemModel;
use stlmpc_core::milp::{MilpModel, Sense, VarKind};
use stlmpc_core::stl::{Formula, Interval, SignalTrace};
use stlmpc_core::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn interval(rng: &mut ChaCha8Rng) -> Interval {
    let a = rng.random_range(0..3u32);
    let b = a + rng.random_range(1..3u32);
    Interval::new(a, b).unwrap()
}

/// Random formula of nesting depth at most `depth` over `preds` predicates.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize, preds: usize, negation: bool) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        let p = Formula::pred(rng.random_range(0..preds));
        return if negation && rng.random_bool(0.3) { Formula::not(p) } else { p };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(rng, depth - 1, preds, negation);
    let f = match rng.random_range(0..6) {
        0 => Formula::and(vec![sub(rng), sub(rng)]),
        1 => Formula::or(vec![sub(rng), sub(rng)]),
        2 => Formula::eventually(interval(rng), sub(rng)),
        3 => Formula::always(interval(rng), sub(rng)),
        4 => Formula::until(interval(rng), sub(rng), sub(rng)),
        _ => Formula::release(interval(rng), sub(rng), sub(rng)),
    };
    if negation && rng.random_bool(0.2) { Formula::not(f) } else { f }
}

/// Samples on a coarse grid so that ties and exact zeros occur.
pub fn random_trace(rng: &mut ChaCha8Rng, width: usize, len: usize) -> SignalTrace {
    let mut tr = SignalTrace::new(width);
    for _ in 0..len {
        let s: Vec<f64> = (0..width)
            .map(|_| if rng.random_bool(0.5) { rng.random_range(-4..=4) as f64 * 0.5 } else { rng.random_range(-2.0..2.0) })
            .collect();
        tr.push(&s);
    }
    tr
}

/// Robustness straight from the recursive definition.
pub fn naive_rho(f: &Formula, tr: &SignalTrace, t: usize) -> f64 {
    let over = |i: &Interval| (t + i.start())..=(t + i.end());
    match f {
        Formula::Predicate(i) => tr.get(t, *i),
        Formula::Not(g) => -naive_rho(g, tr, t),
        Formula::And(gs) => gs.iter().map(|g| naive_rho(g, tr, t)).fold(f64::INFINITY, f64::min),
        Formula::Or(gs) => gs.iter().map(|g| naive_rho(g, tr, t)).fold(f64::NEG_INFINITY, f64::max),
        Formula::Eventually(i, g) => over(i).map(|s| naive_rho(g, tr, s)).fold(f64::NEG_INFINITY, f64::max),
        Formula::Always(i, g) => over(i).map(|s| naive_rho(g, tr, s)).fold(f64::INFINITY, f64::min),
        Formula::Until(i, l, r) => over(i)
            .map(|s| {
                let prefix = (t..=s).map(|q| naive_rho(l, tr, q)).fold(f64::INFINITY, f64::min);
                naive_rho(r, tr, s).min(prefix)
            })
            .fold(f64::NEG_INFINITY, f64::max),
        Formula::Release(i, l, r) => over(i)
            .map(|s| {
                let prefix = (t..=s).map(|q| naive_rho(l, tr, q)).fold(f64::NEG_INFINITY, f64::max);
                naive_rho(r, tr, s).max(prefix)
            })
            .fold(f64::INFINITY, f64::min),
    }
}

/// Boolean semantics with `y >= 0` as the predicate.
pub fn naive_sat(f: &Formula, tr: &SignalTrace, t: usize) -> bool {
    let over = |i: &Interval| (t + i.start())..=(t + i.end());
    match f {
        Formula::Predicate(i) => tr.get(t, *i) >= 0.0,
        Formula::Not(g) => !naive_sat(g, tr, t),
        Formula::And(gs) => gs.iter().all(|g| naive_sat(g, tr, t)),
        Formula::Or(gs) => gs.iter().any(|g| naive_sat(g, tr, t)),
        Formula::Eventually(i, g) => over(i).any(|s| naive_sat(g, tr, s)),
        Formula::Always(i, g) => over(i).all(|s| naive_sat(g, tr, s)),
        Formula::Until(i, l, r) => over(i).any(|s| naive_sat(r, tr, s) && (t..=s).all(|q| naive_sat(l, tr, q))),
        Formula::Release(i, l, r) => over(i).all(|s| naive_sat(r, tr, s) || (t..=s).any(|q| naive_sat(l, tr, q))),
    }
}

/// Smallest `ζ` (to `tol`) with every window robustness of the shifted
/// trace nonnegative, by bisection on the naive evaluator.
pub fn bisect_zeta(f: &Formula, tr: &SignalTrace, times: std::ops::Range<usize>, tol: f64) -> f64 {
    let ok = |z: f64| {
        let s = tr.shifted(z);
        times.clone().all(|t| naive_rho(f, &s, t) >= 0.0)
    };
    if ok(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) { hi = mid } else { lo = mid }
    }
    hi
}

pub fn formula_strategy(preds: usize, negation: bool) -> impl Strategy<Value = Formula> {
    let pred = (0..preds).prop_map(Formula::pred);
    let leaf = if negation {
        prop_oneof![pred.clone(), pred.prop_map(Formula::not)].boxed()
    } else {
        pred.boxed()
    };
    let iv = (0u32..3, 1u32..3).prop_map(|(a, w)| Interval::new(a, a + w).unwrap());
    leaf.prop_recursive(3, 16, 2, move |inner| {
        let base = prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(vec![a, b])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(vec![a, b])),
            (iv.clone(), inner.clone()).prop_map(|(i, g)| Formula::eventually(i, g)),
            (iv.clone(), inner.clone()).prop_map(|(i, g)| Formula::always(i, g)),
            (iv.clone(), inner.clone(), inner.clone()).prop_map(|(i, l, r)| Formula::until(i, l, r)),
            (iv.clone(), inner.clone(), inner.clone()).prop_map(|(i, l, r)| Formula::release(i, l, r)),
        ];
        if negation { prop_oneof![4 => base, 1 => inner.prop_map(Formula::not)].boxed() } else { base.boxed() }
    })
}

pub fn trace_strategy(width: usize, len: usize) -> impl Strategy<Value = SignalTrace> {
    let sample = prop_oneof![(-4i32..=4).prop_map(|k| k as f64 * 0.5), -2.0f64..2.0];
    proptest::collection::vec(sample, width * len).prop_map(move |v| {
        let rows: Vec<&[f64]> = v.chunks(width).collect();
        SignalTrace::from_samples(width, &rows).unwrap()
    })
}

pub fn case_study_model() -> SystemModel {
    SystemModel::new(
        Matrix::from_rows(&[[1.0, 0.5], [0.0, 0.8]]).unwrap(),
        Matrix::from_rows(&[[0.0], [1.0]]).unwrap(),
        Matrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0], [-1.0, 0.0], [1.0, 0.0]]).unwrap(),
        Matrix::zeros(4, 1),
        vec![-2.0, 4.0, -2.0, 4.0],
    )
    .unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-scale..scale)).collect();
    Matrix::from_row_major(rows, cols, data)
}

/// Random model with `A` scaled to an infinity norm in `[0.5, 1.1)`.
pub fn random_model(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize) -> SystemModel {
    let mut a = random_matrix(rng, n, n, 1.0);
    let norm = a.norm_inf();
    if norm > 0.0 {
        a.scale(rng.random_range(0.5..1.1) / norm);
    }
    let d = if rng.random_bool(0.5) { Matrix::zeros(p, m) } else { random_matrix(rng, p, m, 1.0) };
    let e = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    SystemModel::new(a, random_matrix(rng, n, m, 1.0), random_matrix(rng, p, n, 1.0), d, e).unwrap()
}

/// Textbook triple-loop product.
pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = 0.0;
            for k in 0..a.cols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out.row_mut(i)[j] = s;
        }
    }
    out
}

/// Worst-case output offset over all vertex sequences, by enumeration.
pub fn enumerated_offset(model: &SystemModel, vertices: &Matrix, horizon: usize) -> Vec<f64> {
    let p = model.p();
    let v = vertices.cols();
    // images[i][j] = C A^i w_j
    let mut images = Vec::new();
    let mut ca = model.c().clone();
    for _ in 0..horizon {
        images.push(matmul(&ca, vertices));
        ca = matmul(&ca, model.a());
    }
    let mut out = vec![0.0; (horizon + 1) * p];
    for k in 1..=horizon {
        for row in 0..p {
            let mut best = f64::INFINITY;
            for code in 0..v.pow(k as u32) {
                // w_j for j < k, most recent first
                let mut c = code;
                let mut s = 0.0;
                for i in 0..k {
                    s += images[i][(row, c % v)];
                    c /= v;
                }
                best = best.min(s);
            }
            out[k * p + row] = best;
        }
    }
    out
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Optimum of a bounded MILP by enumerating binary assignments and, for each,
/// the vertices of the continuous polytope. `None` when infeasible.
pub fn brute_force_milp(model: &MilpModel) -> Option<f64> {
    let bins: Vec<usize> = (0..model.vars.len()).filter(|&j| model.vars[j].kind == VarKind::Binary).collect();
    let conts: Vec<usize> = (0..model.vars.len()).filter(|&j| model.vars[j].kind == VarKind::Continuous).collect();
    let nc = conts.len();
    let obj = |x: &[f64]| model.objective.eval(x);
    let feasible = |x: &[f64]| model.max_violation(x) <= 1e-7;
    let mut best: Option<f64> = None;
    let mut x = vec![0.0; model.vars.len()];
    for mask in 0..(1usize << bins.len()) {
        for (k, &j) in bins.iter().enumerate() {
            x[j] = ((mask >> k) & 1) as f64;
        }
        // hyperplanes over the continuous variables: constraint rows and bounds
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
        for c in &model.constraints {
            let mut a = vec![0.0; nc];
            let mut rhs = c.rhs;
            for (v, coef) in &c.terms {
                match conts.iter().position(|&j| j == v.0) {
                    Some(k) => a[k] += coef,
                    None => rhs -= coef * x[v.0],
                }
            }
            planes.push((a, rhs));
        }
        for (k, &j) in conts.iter().enumerate() {
            let mut a = vec![0.0; nc];
            a[k] = 1.0;
            planes.push((a.clone(), model.vars[j].lower));
            planes.push((a, model.vars[j].upper));
        }
        let mut choose = vec![0usize; nc];
        let total = planes.len();
        // iterate over all nc-subsets of planes
        fn next(choose: &mut [usize], total: usize) -> bool {
            let k = choose.len();
            for i in (0..k).rev() {
                if choose[i] < total - (k - i) {
                    choose[i] += 1;
                    for j in i + 1..k {
                        choose[j] = choose[j - 1] + 1;
                    }
                    return true;
                }
            }
            false
        }
        for (i, c) in choose.iter_mut().enumerate() {
            *c = i;
        }
        loop {
            let a: Vec<Vec<f64>> = choose.iter().map(|&i| planes[i].0.clone()).collect();
            let b: Vec<f64> = choose.iter().map(|&i| planes[i].1).collect();
            if let Some(sol) = solve_square(a, b) {
                for (k, &j) in conts.iter().enumerate() {
                    x[j] = sol[k];
                }
                if feasible(&x) {
                    let v = obj(&x);
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                }
            }
            if nc == 0 || !next(&mut choose, total) {
                break;
            }
        }
    }
    best
}

/// Random bounded MILP with `bins` binaries and `conts` continuous variables.
pub fn random_milp(rng: &mut ChaCha8Rng, bins: usize, conts: usize, rows: usize) -> MilpModel {
    use stlmpc_core::milp::LinExpr;
    let mut m = MilpModel::new();
    let mut vars = Vec::new();
    for i in 0..bins {
        vars.push(m.add_binary(format!("b{i}")));
    }
    for i in 0..conts {
        let lo = rng.random_range(-3..=0) as f64;
        let hi = lo + rng.random_range(1..=4) as f64;
        vars.push(m.add_continuous(format!("x{i}"), lo, hi));
    }
    for _ in 0..rows {
        let mut e = LinExpr::new();
        for v in &vars {
            if rng.random_bool(0.6) {
                e.add_term(*v, rng.random_range(-5..=5) as f64);
            }
        }
        let sense = match rng.random_range(0..5) {
            0 => Sense::Ge,
            1 if conts > 0 => Sense::Eq,
            _ => Sense::Le,
        };
        let rhs = rng.random_range(-4.0..6.0f64);
        m.add_constraint(e, sense, (rhs * 4.0).round() / 4.0);
    }
    let obj = LinExpr::from_terms(vars.iter().map(|v| (*v, rng.random_range(-10..=10) as f64 + rng.random_range(-0.5..0.5))));
    m.set_objective(obj);
    m
}
