//! Deviation tests for high-dimensional mean vectors.
//!
//! Classical significance tests ask whether a mean equals a reference vector;
//! this crate tests whether it deviates from the reference by more than a
//! prescribed radius: `H0: ||mu - mu0||_2 > d0` against
//! `H1: ||mu - mu0||_2 <= d0`. The statistic is built sequentially as a
//! two-armed-bandit (TAB) process whose control sign opposes the running
//! partial sum, which produces negative feedback (concentration near zero)
//! under the null and positive feedback (divergence) under the alternative.
//!
//! Modules:
//! - [`tab`]: the one-sample test (sample splitting, target variables,
//!   nuisance estimation, TAB recursion, decision rule).
//! - [`two_sample`]: the two-sample extension testing `||mu1 - mu2||_2`.
//! - [`bandit`]: the limiting bandit distribution `B(kappa)` in closed form
//!   (density, tails, CDF, quantile, sampler).
//! - [`power`]: theoretical size and power from the drift parameter `kappa`.
//! - [`sim`]: seeded, parallel Monte Carlo experiments over `(n, T, d0)`
//!   grids.
//! - [`sde`]: an independent Euler–Maruyama check of the limit law through
//!   the reflected-drift diffusion and its closed-form transition density.
//! - [`csv`], [`manifest`], [`quad`], [`ks`], [`normal`]: supporting I/O and
//!   numerics.

// Reference constants and published approximation coefficients are written
// with their full decimal expansions.
#![allow(clippy::excessive_precision)]

pub mod bandit;
pub mod csv;
pub mod error;
pub mod ks;
pub mod manifest;
pub mod matrix;
pub mod normal;
pub mod power;
pub mod quad;
pub mod sde;
pub mod sim;
pub mod tab;
pub mod two_sample;

pub use bandit::{bandit_tail_prob, BanditParams};
pub use error::{Error, Result};
pub use matrix::{Matrix, SampleMatrix};
pub use tab::{
    one_sample_deviation_test, NuisanceEstimates, OneSampleConfig, TabTrajectory, TestResult,
};
pub use two_sample::{two_sample_deviation_test, TwoSampleConfig};
