//! CSV files: closed-loop traces, robustness series and signal input.

use std::path::Path;

use anyhow::{bail, Context};
use stlmpc_core::milp::SolveStatus;
use stlmpc_core::mpc::ClosedLoopTrace;
use stlmpc_core::stl::SignalTrace;

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::NodeLimit => "node_limit",
        SolveStatus::TimeLimit => "time_limit",
    }
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |i| format!("{prefix}{i}"))
}

/// Columns `t, x1..xn, u1..um, w1..wn, y1..yp, zeta, objective, status`.
pub fn write_trace_csv(path: &Path, trace: &ClosedLoopTrace) -> anyhow::Result<()> {
    let first = trace.records.first().context("empty trace")?;
    let (n, m, p) = (first.x.len(), first.u.len(), first.y.len());
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["t".to_string()];
    header.extend(numbered("x", n));
    header.extend(numbered("u", m));
    header.extend(numbered("w", n));
    header.extend(numbered("y", p));
    header.extend(["zeta", "objective", "status"].map(String::from));
    w.write_record(&header)?;
    for r in &trace.records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.x.iter().chain(&r.u).chain(&r.w).chain(&r.y).map(|v| v.to_string()));
        row.push(r.zeta.to_string());
        row.push(r.objective.to_string());
        row.push(status_name(r.status).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, rho`.
pub fn write_robustness_csv(path: &Path, rho: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["t", "rho"])?;
    for (t, r) in rho.iter().enumerate() {
        w.write_record([t.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a signal from CSV with a header row. A `t` column is ignored; when
/// columns `y1, y2, ...` exist only those are used (so a simulation trace can
/// be monitored directly), otherwise every column is a signal.
pub fn read_signal_csv(path: &Path) -> anyhow::Result<SignalTrace> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.clone();
    let ys: Vec<usize> = (1..)
        .map_while(|i| header.iter().position(|h| h == format!("y{i}")))
        .collect();
    let cols: Vec<usize> = if ys.is_empty() {
        header.iter().enumerate().filter(|(_, h)| !h.eq_ignore_ascii_case("t")).map(|(i, _)| i).collect()
    } else {
        ys
    };
    if cols.is_empty() {
        bail!("{}: no signal columns", path.display());
    }
    let mut trace = SignalTrace::new(cols.len());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), k + 2))?;
        if rec.len() != header.len() {
            bail!("{}: row {} has {} columns, header has {}", path.display(), k + 2, rec.len(), header.len());
        }
        let mut sample = Vec::with_capacity(cols.len());
        for &c in &cols {
            let v: f64 = rec[c]
                .parse()
                .with_context(|| format!("{}: row {}, column {:?}", path.display(), k + 2, &header[c]))?;
            sample.push(v);
        }
        trace.push(&sample);
    }
    Ok(trace)
}
