use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use stlmpc_cli::commands::{self, Overrides};
use stlmpc_cli::traces::read_signal_csv;
use stlmpc_cli::{config, scenarios, ProblemConfig};

/// Robust STL model predictive control for disturbed linear systems.
#[derive(Debug, Parser)]
#[command(name = "stlmpc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Output directory [default: $STLMPC_OUT_DIR, then ./out]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the disturbance seed of the configuration
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Drop the oldest robustness constraint and the last control when D = 0
    #[arg(long)]
    d_zero_reduction: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, d_zero_reduction: self.d_zero_reduction }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the closed loop and write trace.csv and robustness.csv
    Simulate {
        /// Problem configuration (JSON), or the name of a bundled scenario
        #[arg(long, value_name = "PATH")]
        config: String,
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 when some robustness value is negative
        #[arg(long)]
        require_satisfaction: bool,
        /// Also write the step-0 model as step0.lp
        #[arg(long)]
        lp_export: bool,
    },
    /// Compute the robustness series of a formula over a CSV signal
    Monitor {
        /// Formula over p1, p2, ... (columns in order, or y1, y2, ... when present)
        #[arg(long)]
        formula: String,
        /// CSV file with a header row
        #[arg(long, value_name = "PATH")]
        trace: PathBuf,
        /// Directory for robustness.csv (nothing is written when omitted)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Exit with status 3 when the formula is violated
        #[arg(long)]
        require_satisfaction: bool,
    },
    /// Write the step-t optimization model in LP format
    Encode {
        #[arg(long, value_name = "PATH")]
        config: String,
        #[arg(long, default_value_t = 0)]
        time: usize,
        /// Current state, comma separated [default: the configured initial state]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        state: Option<Vec<f64>>,
        /// CSV of past outputs y[t-k..t-1]
        #[arg(long, value_name = "PATH")]
        history: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Output file [default: <out>/model_t<time>.lp]
        #[arg(long, value_name = "FILE")]
        lp_export: Option<PathBuf>,
    },
    /// Run all bundled scenarios
    CaseStudy {
        #[command(flatten)]
        common: Common,
    },
    /// Print the configuration schema, or a normalized configuration
    Schema {
        /// Normalize this configuration instead of printing the schema
        #[arg(long, value_name = "PATH")]
        normalize: Option<String>,
    },
}

fn load_config(arg: &str) -> anyhow::Result<ProblemConfig> {
    match scenarios::by_name(arg) {
        Some(s) if !std::path::Path::new(arg).exists() => Ok(s.config()),
        _ => ProblemConfig::load(arg.as_ref()),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, common, require_satisfaction, lp_export } => {
            let cfg = load_config(&config)?;
            let out = commands::resolve_out_dir(common.out.clone());
            let summary = commands::simulate(&cfg, &common.overrides(), &out, lp_export)?;
            println!("{summary}");
            println!("wrote {}", out.display());
            if require_satisfaction && !summary.satisfied() {
                eprintln!("specification violated");
                return Ok(ExitCode::from(3));
            }
        }
        Command::Monitor { formula, trace, out, require_satisfaction } => {
            let v = commands::monitor_file(&formula, &trace, out.as_deref())?;
            for (t, r) in v.robustness.iter().enumerate() {
                println!("{t},{r}");
            }
            println!("{}", if v.satisfied { "satisfied" } else { "violated" });
            if require_satisfaction && !v.satisfied {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Encode { config, time, state, history, common, lp_export } => {
            let cfg = load_config(&config)?;
            let hist = history.as_deref().map(read_signal_csv).transpose()?;
            let enc = commands::encode(&cfg, &common.overrides(), time, state.as_deref(), hist.as_ref())?;
            let path = match lp_export {
                Some(p) => p,
                None => {
                    let dir = commands::resolve_out_dir(common.out.clone());
                    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    dir.join(format!("model_t{time}.lp"))
                }
            };
            std::fs::write(&path, &enc.text).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{}: {} variables ({} binary), {} constraints",
                path.display(),
                enc.variables,
                enc.binaries,
                enc.constraints
            );
        }
        Command::CaseStudy { common } => {
            let out = commands::resolve_out_dir(common.out.clone());
            std::fs::create_dir_all(&out)?;
            for s in commands::case_study(&common.overrides(), &out)? {
                println!("{s}");
            }
            println!("wrote {}", out.display());
        }
        Command::Schema { normalize } => match normalize {
            Some(path) => print!("{}", load_config(&path)?.normalized()?.to_json()),
            None => println!("{}", serde_json::to_string_pretty(&config::schema())?),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
