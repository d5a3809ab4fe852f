//! Receding-horizon controller synthesis for disturbed discrete-time linear
//! systems under signal temporal logic (STL) specifications.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`stl`]: formula syntax, parsing, horizon, positive normal form and the
//!   quantitative robustness semantics used as ground truth everywhere else.
//! * [`linsys`]: system and disturbance models, stacked flow matrices and the
//!   worst-case corner-bound prediction of secondary signals.
//! * [`milp`]: a small mixed-integer linear modelling layer, a deterministic
//!   branch-and-bound solver on top of a dense bounded simplex, and the binary
//!   encoding of STL formulas.
//! * [`mpc`]: the per-step optimization, minimal-violation softening and the
//!   disturbed closed loop.
//!
//! IO, configuration files and the command line live in the companion
//! `stlmpc-cli` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod linalg;
pub mod linsys;
pub mod milp;
pub mod mpc;
pub mod stl;

pub use linalg::Matrix;
