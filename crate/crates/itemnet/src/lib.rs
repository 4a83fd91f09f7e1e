//! Bayesian edge selection for binary item networks.
//!
//! An item network places a pairwise-interaction (Ising-type) distribution on
//! binary response vectors: each item carries a main effect and each item pair
//! an interaction weight, and the normalizing constant sums over all `2^p`
//! response patterns. Estimating which interactions are nonzero is a variable
//! selection problem with a doubly-intractable likelihood, since the
//! normalizing constant depends on the parameters.
//!
//! This crate provides:
//!
//! * [`model`]: the response matrix, parameter layout, sufficient statistics,
//!   and exact (enumeration-based) partition function for small item counts.
//! * [`inner`]: Gibbs sweeps over response matrices, used both to draw the
//!   auxiliary data sets the outer sampler needs and to simulate from a fitted
//!   network.
//! * [`sampler`]: the spike-and-slab double Metropolis-Hastings sampler and
//!   its posterior summaries (inclusion probabilities, thresholded estimates,
//!   signed adjacency).
//! * [`pseudolikelihood`]: a node-wise l1-penalized logistic regression
//!   baseline with EBIC penalty selection.
//! * [`simulation`]: a latent-class generator for synthetic response data
//!   with a known signed adjacency.
//! * [`diagnostics`]: batch-means Monte Carlo standard errors, posterior
//!   predictive p-values, and the error summaries used to compare methods.
//!
//! Everything numeric is generic over the scalar type through the
//! [`scalar::Scalar`] trait; [`Params`], [`Estimate`], and the other aliases
//! at the crate root fix `f64` for ordinary use.

// Index arithmetic over symmetric matrices and flat coordinate layouts is
// clearer with explicit indices than with zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod adjacency;
pub mod diagnostics;
pub mod inner;
pub mod model;
pub mod pseudolikelihood;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod simulation;

/// Errors reported by the fitting, simulation, and diagnostic routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input data failed validation (non-binary cells, ragged rows, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),
    /// A configuration value is out of its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// Vector or matrix sizes do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An exact-enumeration routine was asked for more items than the bound
    /// allows; the sweep-based routines handle larger item sets.
    #[error(
        "{items} items exceeds the enumeration bound {bound}: exact partition sums walk all \
         2^p response patterns, so use the Gibbs-sweep routines for item sets this large"
    )]
    EnumerationBound { items: usize, bound: usize },
    /// A chain or series is too short for the requested summary.
    #[error("series too short: need at least {need} values, got {got}")]
    SeriesTooShort { need: usize, got: usize },
    /// A stored chain file is malformed.
    #[error("bad chain file: {0}")]
    BadChainFile(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Parameter vector over `f64`, the default scalar type.
pub type Params = model::ParamVector<f64>;
/// Sampler configuration over `f64`.
pub type Config = sampler::SamplerConfig<f64>;
/// One stored outer-sampler state over `f64`.
pub type Record = sampler::ChainRecord<f64>;
/// Posterior network estimate over `f64`.
pub type Estimate = sampler::NetworkEstimate<f64>;
/// Synthetic-data design over `f64`.
pub type Design = simulation::SimDesign<f64>;
