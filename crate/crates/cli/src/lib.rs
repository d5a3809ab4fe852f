//! Files and command line around `stlmpc-core`: JSON problem configs,
//! LP export, CSV traces and the bundled case-study scenarios.

pub mod commands;
pub mod config;
pub mod lp;
pub mod scenarios;
pub mod traces;

pub use config::{ConfigError, Problem, ProblemConfig};
