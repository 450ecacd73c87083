//! Monte Carlo variance reduction with weight-bounded importance sampling.
//!
//! Importance sampling can fail badly when the weight function `p/q` is
//! unbounded: the estimator variance becomes infinite and estimates are
//! unreliable at any sample size. This crate implements the weight-bounded
//! estimator, which zeroes samples whose weight exceeds a bound `r`, together
//! with a data-driven way to pick `r`: group the truncated weights, and choose
//! the largest bound whose group means still pass an Anderson-Darling
//! normality test (approximate normality of group means is the CLT signature
//! of a finite weight variance).
//!
//! Alongside the estimator the crate ships the pieces needed to exercise it
//! end to end:
//!
//! - [`stats`]: normal pdf/cdf/quantile and the Anderson-Darling test;
//! - [`estimators`]: plain MC, standard IS, defensive-mixture IS, and
//!   weight-bounded IS over [`estimators::WeightedSample`] batches;
//! - [`threshold`]: the grouped normality-test search for the bound;
//! - [`mixture`]: a 5-dimensional benchmark whose IS weight is unbounded by
//!   construction;
//! - [`credit`]: a latent-factor portfolio credit-risk model with a
//!   cross-entropy-fitted Gaussian proposal;
//! - [`rng`]: counter-based seed/stream derivation for reproducible parallel
//!   experiments.

pub mod credit;
pub mod error;
pub mod estimators;
pub mod mixture;
pub mod rng;
pub mod stats;
pub mod threshold;

pub use error::{Error, Result};
