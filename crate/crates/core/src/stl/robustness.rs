use alloc::vec::Vec;

use super::{Formula, SignalTrace, StlError};

/// Quantitative robustness of `f` on `trace` at time `t`.
///
/// Intervals are inclusive. Until is `max_{t'} min(rho_r[t'], min_{t''∈[t,t']} rho_l[t''])`
/// and release is its exact dual. Non-negative values count as satisfaction.
pub fn robustness(f: &Formula, trace: &SignalTrace, t: usize) -> Result<f64, StlError> {
    let h = f.horizon();
    if t + h >= trace.len() {
        return Err(StlError::TraceTooShort { needed: t + h + 1, available: trace.len() });
    }
    let sig = robustness_signal(f, &trace.window(t, t + h + 1))?;
    Ok(sig[0])
}

/// Robustness at every computable time `0..=len-1-horizon` (empty if none).
pub fn robustness_signal(f: &Formula, trace: &SignalTrace) -> Result<Vec<f64>, StlError> {
    let mut err = None;
    f.visit_predicates(&mut |i, _| {
        if i >= trace.width() && err.is_none() {
            err = Some(StlError::WidthMismatch { predicate: i, width: trace.width() });
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(signal(f, trace))
}

fn signal(f: &Formula, tr: &SignalTrace) -> Vec<f64> {
    let len = tr.len().saturating_sub(f.horizon());
    match f {
        Formula::Predicate(i) => (0..len).map(|t| tr.get(t, *i)).collect(),
        Formula::Not(g) => signal(g, tr).into_iter().map(|v| -v).collect(),
        Formula::And(gs) => combine(gs, tr, len, f64::min),
        Formula::Or(gs) => combine(gs, tr, len, f64::max),
        Formula::Eventually(i, g) => {
            let s = signal(g, tr);
            (0..len).map(|t| i.offsets().map(|k| s[t + k]).fold(f64::NEG_INFINITY, f64::max)).collect()
        }
        Formula::Always(i, g) => {
            let s = signal(g, tr);
            (0..len).map(|t| i.offsets().map(|k| s[t + k]).fold(f64::INFINITY, f64::min)).collect()
        }
        Formula::Until(i, l, r) => {
            let (sl, sr) = (signal(l, tr), signal(r, tr));
            (0..len)
                .map(|t| {
                    let mut prefix = f64::INFINITY;
                    let mut best = f64::NEG_INFINITY;
                    for k in 0..=i.end() {
                        prefix = prefix.min(sl[t + k]);
                        if k >= i.start() {
                            best = best.max(sr[t + k].min(prefix));
                        }
                    }
                    best
                })
                .collect()
        }
        Formula::Release(i, l, r) => {
            let (sl, sr) = (signal(l, tr), signal(r, tr));
            (0..len)
                .map(|t| {
                    let mut prefix = f64::NEG_INFINITY;
                    let mut worst = f64::INFINITY;
                    for k in 0..=i.end() {
                        prefix = prefix.max(sl[t + k]);
                        if k >= i.start() {
                            worst = worst.min(sr[t + k].max(prefix));
                        }
                    }
                    worst
                })
                .collect()
        }
    }
}

fn combine(gs: &[Formula], tr: &SignalTrace, len: usize, op: fn(f64, f64) -> f64) -> Vec<f64> {
    let mut it = gs.iter().map(|g| signal(g, tr));
    let mut acc = it.next().expect("connective has children");
    acc.truncate(len);
    for s in it {
        for (a, v) in acc.iter_mut().zip(s) {
            *a = op(*a, v);
        }
    }
    acc
}
