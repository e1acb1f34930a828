//! Wait-or-go decision engine for drone sensing missions.
//!
//! After sensing at a point of interest the drone either hovers until the
//! onboard computation finishes, or leaves immediately and turns back if the
//! result demands a follow-up action. This crate provides:
//!
//! * [`flight`]: trapezoidal kinematics for flight, takeoff/land and turn-back delays,
//! * [`world`]: the ground-truth event probability field and seeded event traces,
//! * [`experience`]: the capped experience memory and the two reset detectors,
//! * [`regression`]: linear, CART and Bayesian probability estimators,
//! * [`decision`]: the expected-saving rule and the benchmark policies,
//! * [`sim`]: the mission executor and the multi-day experiment loop,
//! * [`harness`]: configuration, trace files, sweeps, reports and SVG charts.

// `!(x >= 0.0)` style checks are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decision;
pub mod error;
pub mod experience;
pub mod flight;
pub mod harness;
pub mod iforest;
pub mod regression;
pub mod rng;
pub mod sim;
pub mod world;

pub use error::{Error, Result};
