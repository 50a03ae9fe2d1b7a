//! Calibration analysis of margin-based surrogate losses for adversarially
//! robust linear classification.
//!
//! The library answers, numerically and analytically, when a surrogate loss
//! is *calibrated* for the robust 0-1 loss `1{y f(x) <= gamma}` over
//! unit-norm linear models on the L2 unit ball — i.e. when driving the
//! surrogate's excess risk to zero forces the robust excess risk to zero —
//! and quantifies the rate through calibration functions, their convex
//! envelopes, and excess-risk transforms. A small experiment harness trains
//! normalized linear models by batch gradient descent on synthetic
//! two-Gaussian data and logs surrogate/robust risk trajectories so the
//! theory can be checked against optimization behavior.
//!
//! Modules:
//! - [`loss`]: the six loss families, shifts, even parts, one-sided
//!   derivatives, and structural property reports.
//! - [`risk`]: class-conditional risks, interval infima, and robust/plain
//!   empirical risks of linear models.
//! - [`calibration`]: the numeric calibration function, Fenchel-Legendre
//!   biconjugate, excess-risk transform, and calibration verdicts.
//! - [`closed_form`]: analytic calibration functions and envelopes per
//!   parameter regime, used as oracles against the numeric engine.
//! - [`experiment`]: two-Gaussian data generation, gradient-descent training,
//!   trajectory logging, and CSV ingestion.
//! - [`numeric`] and [`util`]: shared minimization, hull, and serialization
//!   helpers.

// Validation code writes `!(x > 0.0)`-style checks on purpose: they reject
// NaN along with out-of-range values in one comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod closed_form;
pub mod error;
pub mod experiment;
pub mod loss;
pub mod numeric;
pub mod risk;
pub mod util;

pub use error::{Error, Result};
