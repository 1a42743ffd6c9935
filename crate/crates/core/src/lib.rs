//! Multiobjective model predictive control with terminal conditions.
//!
//! At every step of the receding-horizon loop a multiobjective optimal
//! control problem is solved: several stage-cost criteria are minimized
//! simultaneously over control sequences of a fixed horizon, subject to
//! state, input, and terminal constraints. The loop picks one efficient
//! solution per step, constrained by upper bounds taken from the shifted
//! previous solution, applies its first input, and repeats.
//!
//! The crate is organized in layers:
//!
//! * [`dynamics`] — discrete-time system models, rollouts, feasibility.
//! * [`objectives`] — stage/terminal costs, cost functionals, rotated
//!   costs, and dissipativity certificates.
//! * [`solver`] — scalarized nonlinear programs, Pareto front
//!   approximation, ideal points, dominance filtering, and a brute-force
//!   enumeration oracle.
//! * [`mpc`] — the closed-loop algorithms and selection rules.
//! * [`diagnostics`] — post-hoc checks of every performance and
//!   stability bound the scheme guarantees.
//! * [`problems`] — the shipped benchmark problems.
//!
//! The crate is `no_std`-compatible (`--no-default-features --features
//! libm`); all containers come from `alloc` and float math is routed
//! through a small shim in [`math`].

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("mompc-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod math;
pub mod mpc;
pub mod objectives;
pub mod problems;
pub mod solver;

pub use error::{Error, Result};

/// Default tolerance for constraint satisfaction. The inner NLP meets
/// constraints only approximately, so every feasibility decision in the
/// crate is made relative to an explicit tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Default dominance tolerance in cost units.
pub const DOMINANCE_TOL: f64 = 1e-6;
