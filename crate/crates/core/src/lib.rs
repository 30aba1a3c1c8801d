//! Convergence of empirical measures of subordinated diffusions in Wasserstein
//! distance: spectral models, path simulation, exact transport, limit
//! constants and the experiment harness.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod empirical;
pub mod error;
pub mod harness;
pub mod ot;
pub mod predictions;
pub mod rng;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
