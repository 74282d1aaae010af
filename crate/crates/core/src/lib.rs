//! Bayesian sample size determination from posterior-concentration criteria.
//!
//! The crate is organised around four layers that check one another:
//!
//! * [`criteria`] turns an error bound into a minimal sample size using the
//!   asymptotic leading term of the expected posterior functional;
//! * [`exact`] evaluates the same expected functionals in closed form for
//!   conjugate models, or by quadrature over the sufficient statistic for the
//!   exponential/Beta model;
//! * [`expansions`] evaluates leading terms for posterior moments, quantiles,
//!   densities and density derivatives;
//! * [`montecarlo`] estimates any of them by seeded simulation.
//!
//! [`tables`] assembles the three reference comparison tables from those pieces.

// Guards are written as `!(x > 0.0)` so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod exact;
pub mod expansions;
pub mod models;
pub mod montecarlo;
pub mod quad;
pub mod specfun;
pub mod tables;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("criterion unsatisfiable: {reason} (at theta = {theta})")]
    Unsatisfiable { reason: String, theta: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical accuracy: {0}")]
    Accuracy(String),
    #[error("unsupported posterior shape: {0}")]
    UnsupportedShape(String),
    #[error("replicate {index}: {source}")]
    Replicate { index: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub use criteria::{min_sample_size, Criterion, CriterionKind, ParamRange, SampleSizeResult};
pub use models::{Functional, HpdInterval, LikelihoodFamily, Posterior, Prior, SufficientStat};
pub use montecarlo::{MonteCarloEstimate, SeededGenerator};
