//! Distribution of the mean-shifted product of correlated normal variables
//! and of sums of independent copies: exact densities, tail probabilities,
//! quantiles, large-argument asymptotic expansions, and Monte Carlo
//! sampling.

pub mod asym;
pub mod error;
pub mod harness;
pub mod mc;
pub mod exact;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
