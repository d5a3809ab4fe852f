//! Mixed-integer linear models, the big-M encoding of positive STL formulas
//! and a deterministic branch-and-bound solver.

mod bnb;
mod encode;
mod model;
mod simplex;

use alloc::vec::Vec;
use core::time::Duration;

use thiserror::Error;

pub use encode::{assert_window, encode_formula, encode_predicates, EncodingResult, PredicateGrid, StlEncoder};
pub use model::{Constraint, LinExpr, MilpModel, Sense, VarId, VarKind, Variable};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MilpError {
    #[error("variable {0} is not declared")]
    UnknownVariable(VarId),
    #[error("variable {0} has invalid bounds")]
    InvalidBounds(VarId),
    #[error("non-finite coefficient or right-hand side")]
    NonFinite,
    #[error("big-M constant must be positive, got {0}")]
    NonPositiveBigM(f64),
    #[error("formula must be negation-free")]
    NegatedFormula,
    #[error("output window has no sample for time {time}")]
    WindowTooShort { time: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
    TimeLimit,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub feasibility_tolerance: f64,
    pub integrality_tolerance: f64,
    /// Relative optimality gap at which a node is pruned.
    pub mip_gap: f64,
    pub node_limit: Option<usize>,
    /// Only enforced when `clock` is set.
    pub time_limit: Option<Duration>,
    /// Monotonic clock; the core crate has no time source of its own.
    pub clock: Option<fn() -> Duration>,
    /// Overrides the derived big-M constant of the STL encoding.
    pub big_m: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tolerance: 1e-6,
            integrality_tolerance: 1e-6,
            mip_gap: 1e-9,
            node_limit: None,
            time_limit: None,
            clock: None,
            big_m: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MilpError> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.feasibility_tolerance) || !pos(self.integrality_tolerance) {
            return Err(MilpError::InvalidConfig("tolerances must be positive"));
        }
        if !(self.mip_gap >= 0.0) {
            return Err(MilpError::InvalidConfig("gap must be nonnegative"));
        }
        if let Some(k) = self.big_m {
            if !pos(k) {
                return Err(MilpError::NonPositiveBigM(k));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Best solution found; empty when there is none.
    pub values: Vec<f64>,
    pub objective: f64,
    pub nodes: usize,
    /// Objective of the root LP relaxation.
    pub root_bound: f64,
}

impl SolveResult {
    fn without_solution(status: SolveStatus, nodes: usize, root_bound: f64) -> Self {
        Self { status, values: Vec::new(), objective: f64::NAN, nodes, root_bound }
    }

    pub fn has_solution(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }
}

/// Minimizes `model` by best-bound branch and bound over its binaries.
pub fn solve(model: &MilpModel, cfg: &SolverConfig) -> Result<SolveResult, MilpError> {
    cfg.validate()?;
    bnb::solve_impl(model, cfg)
}
