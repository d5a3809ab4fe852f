//! Subcommand implementations, usable without the argument parser.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use stlmpc_core::mpc::{sampler_for, ClosedLoopTrace, Planner};
use stlmpc_core::stl::{monitor, parse, SignalTrace};

use crate::config::{Problem, ProblemConfig};
use crate::lp::export_lp;
use crate::scenarios;
use crate::traces::{read_signal_csv, write_robustness_csv, write_trace_csv};

/// Robustness at or above this counts as satisfied for the closed-loop
/// verdict; it absorbs solver round-off on scenarios that sit exactly on
/// the boundary.
pub const SATISFACTION_TOLERANCE: f64 = 1e-6;

pub const OUT_DIR_ENV: &str = "STLMPC_OUT_DIR";

/// `--out`, then `$STLMPC_OUT_DIR`, then `./out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub d_zero_reduction: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ProblemConfig) {
        if let Some(s) = self.seed {
            cfg.simulation.seed = s;
        }
        if self.d_zero_reduction {
            cfg.controller.d_zero_reduction = true;
        }
    }
}

pub fn planner_for(problem: &Problem) -> anyhow::Result<Planner> {
    Ok(Planner::new(&problem.model, &problem.disturbance, &problem.controls, &problem.formula, problem.controller.clone())?)
}

/// Runs the closed loop with the problem's seeded disturbance sampler.
pub fn run_problem(problem: &Problem) -> anyhow::Result<(Planner, ClosedLoopTrace)> {
    let planner = planner_for(problem)?;
    let mut source = sampler_for(&problem.disturbance, problem.seed);
    let trace = planner.run_closed_loop(&problem.initial_state, problem.steps, source.as_mut())?;
    Ok((planner, trace))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub name: String,
    pub steps: usize,
    pub min_robustness: Option<f64>,
    pub max_zeta: f64,
    pub softened_steps: usize,
    pub total_cost: f64,
}

impl Summary {
    pub fn of(name: &str, trace: &ClosedLoopTrace) -> Self {
        Self {
            name: name.to_string(),
            steps: trace.records.len(),
            min_robustness: trace.min_robustness(),
            max_zeta: trace.max_zeta(),
            softened_steps: trace.records.iter().filter(|r| r.zeta > SATISFACTION_TOLERANCE).count(),
            total_cost: trace.total_cost(),
        }
    }

    pub fn satisfied(&self) -> bool {
        self.min_robustness.is_none_or(|r| r >= -SATISFACTION_TOLERANCE)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rho = self.min_robustness.map_or("n/a (run shorter than the formula horizon)".to_string(), |r| format!("{r:.6}"));
        write!(
            f,
            "{}: {} steps, min rho {rho}, max zeta {:.6} ({} softened steps), total cost {:.6}",
            if self.name.is_empty() { "simulation" } else { &self.name },
            self.steps,
            self.max_zeta,
            self.softened_steps,
            self.total_cost
        )
    }
}

fn write_run(dir: &Path, trace: &ClosedLoopTrace) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_trace_csv(&dir.join("trace.csv"), trace)?;
    write_robustness_csv(&dir.join("robustness.csv"), &trace.robustness)
}

/// `simulate`: closed loop, `trace.csv`, `robustness.csv` and optionally the
/// step-0 model as `step0.lp`.
pub fn simulate(cfg: &ProblemConfig, overrides: &Overrides, out: &Path, lp_export: bool) -> anyhow::Result<Summary> {
    let mut cfg = cfg.clone();
    overrides.apply(&mut cfg);
    let problem = cfg.build()?;
    let (planner, trace) = run_problem(&problem)?;
    write_run(out, &trace)?;
    if lp_export {
        let hist = planner.new_history();
        let sm = planner.build_model(&problem.initial_state, &hist, 0)?;
        std::fs::write(out.join("step0.lp"), export_lp(&sm.model))?;
    }
    Ok(Summary::of(&cfg.name, &trace))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub robustness: Vec<f64>,
    pub satisfied: bool,
}

/// `monitor`: robustness of `formula` over a CSV signal.
pub fn monitor_file(formula: &str, trace: &Path, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let f = parse(formula).map_err(|e| anyhow::anyhow!("formula: {e}"))?;
    let signal = read_signal_csv(trace)?;
    monitor_signal(&f, &signal, out)
}

pub fn monitor_signal(f: &stlmpc_core::stl::Formula, signal: &SignalTrace, out: Option<&Path>) -> anyhow::Result<Verdict> {
    let robustness = monitor(f, signal)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_robustness_csv(&dir.join("robustness.csv"), &robustness)?;
    }
    let satisfied = robustness.iter().all(|r| *r >= 0.0);
    Ok(Verdict { robustness, satisfied })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodeOutput {
    pub text: String,
    pub binaries: usize,
    pub variables: usize,
    pub constraints: usize,
}

/// `encode`: the step-`t` model as LP text. `history` holds the outputs
/// `y[t-k..t-1]` (one row each, original output order).
pub fn encode(
    cfg: &ProblemConfig,
    overrides: &Overrides,
    t: usize,
    state: Option<&[f64]>,
    history: Option<&SignalTrace>,
) -> anyhow::Result<EncodeOutput> {
    let mut cfg = cfg.clone();
    overrides.apply(&mut cfg);
    let problem = cfg.build()?;
    let planner = planner_for(&problem)?;
    let x = state.unwrap_or(&problem.initial_state);
    let mut hist = planner.new_history();
    if let Some(h) = history {
        if h.width() != problem.model.p() {
            bail!("history has {} columns, the system has {} outputs", h.width(), problem.model.p());
        }
        if h.len() > t {
            bail!("history has {} rows but only {t} steps precede t = {t}", h.len());
        }
        let remapped = planner.model().outputs().remap_trace(h);
        let filler = vec![0.0; remapped.width()];
        for _ in 0..t - h.len() {
            hist.push(filler.clone());
        }
        for k in 0..remapped.len() {
            hist.push(remapped.sample(k).to_vec());
        }
    }
    let sm = planner.build_model(x, &hist, t)?;
    Ok(EncodeOutput {
        text: export_lp(&sm.model),
        binaries: sm.binaries,
        variables: sm.model.num_vars(),
        constraints: sm.model.constraints.len(),
    })
}

/// `case-study`: every bundled scenario in its own directory plus
/// `robustness_all.csv` with one column per main scenario.
pub fn case_study(overrides: &Overrides, out: &Path) -> anyhow::Result<Vec<Summary>> {
    let runs: Vec<anyhow::Result<(Summary, Vec<f64>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios::ALL
            .iter()
            .map(|sc| {
                s.spawn(move || -> anyhow::Result<(Summary, Vec<f64>)> {
                    let mut cfg = sc.config();
                    overrides.apply(&mut cfg);
                    let problem = cfg.build()?;
                    let (_, trace) = run_problem(&problem).with_context(|| format!("scenario {}", sc.name))?;
                    write_run(&out.join(sc.name), &trace)?;
                    Ok((Summary::of(sc.name, &trace), trace.robustness))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut summaries = Vec::new();
    let mut series = Vec::new();
    for (sc, run) in scenarios::ALL.iter().zip(runs) {
        let (summary, rho) = run?;
        if sc.in_overview {
            series.push((sc.name, rho));
        }
        summaries.push(summary);
    }
    let mut w = csv::Writer::from_path(out.join("robustness_all.csv"))?;
    let mut header = vec!["t"];
    header.extend(series.iter().map(|(n, _)| *n));
    w.write_record(&header)?;
    let len = series.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    for t in 0..len {
        let mut row = vec![t.to_string()];
        row.extend(series.iter().map(|(_, r)| r.get(t).map_or(String::new(), |v| v.to_string())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(summaries)
}
