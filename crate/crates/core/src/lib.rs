//! Adaptive iterative hard thresholding for sparse high-dimensional linear
//! regression.
//!
//! The crate implements the full estimator family around the thresholded
//! gradient iteration `b <- T_lambda(b + X^T(y - Xb) / max_j ||X_j||^2)`:
//!
//! - [`iht`]: geometric threshold schedules with the closed-form stopping
//!   time for known sparsity and noise level;
//! - [`adaptive`]: residual-driven noise estimation, adaptive early stopping
//!   and penalized iteration selection, needing neither `s` nor `sigma`;
//! - [`sharp`]: the fixed-threshold refinement stage reaching the oracle
//!   rate above the universal signal separation, plus support decoding and
//!   oracle least squares;
//! - [`rip`]: exact and sampled restricted eigenvalue audits with the
//!   contraction check used to certify small designs;
//! - [`baselines`]: classical top-s IHT and an ISTA l1 solver for
//!   comparisons;
//! - [`experiments`]: a seeded, thread-count-independent Monte Carlo
//!   harness with CSV and plot-data outputs.

pub mod adaptive;
pub mod baselines;
pub mod error;
pub mod experiments;
pub mod iht;
pub mod model;
pub mod rip;
pub mod rng;
pub mod sharp;
pub mod thresholding;
pub mod trace;

pub use error::{Error, Result};
