//! Lipschitz dueling bandits over `[0,1]^d` with logarithmic-space
//! recursive cube elimination (Log-DuelLi), synthetic preference
//! environments, baseline learners, and an experiment / validation harness.

pub mod baselines;
pub mod env;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod learner;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
