//! Fractional-order optimal control of a two-community cholera model.
//!
//! * [`fode`]: Adams–Bashforth–Moulton PECE integrator for Caputo problems,
//!   with piecewise-constant (restarting) variable order.
//! * [`model`]: the controlled cholera system and its reproduction numbers.
//! * [`sensitivity`]: normalized forward sensitivity indices.
//! * [`focp`]: forward–backward sweep for the optimal control problem.
//! * [`costeff`]: averted cases, costs, ACER and ICER ranking.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod costeff;
pub mod error;
pub mod focp;
pub mod fode;
pub mod grid;
pub mod math;
pub mod model;
pub mod sensitivity;

pub use error::{Error, Result};
pub use fode::{rhs_fn, solve_caputo_ivp, solve_variable_order, Pece, Rhs};
pub use grid::{OrderSchedule, Segment, TimeGrid, Trajectory};
pub use model::{alpha_scale, ControlVector, ModelParams, Param, ScaledParams, State};
