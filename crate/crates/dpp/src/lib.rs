//! Determinantal point processes over explicit kernel matrices.
//!
//! An L-ensemble assigns P(Y) = det(L_Y) / det(L + I) to every subset of a
//! ground set. This crate covers the exact operations that make that model
//! practical: normalization, marginal and conditional probabilities, the
//! L <-> K correspondence, exact sampling, convex maximum-likelihood
//! learning of feature-conditioned kernels, budgeted greedy MAP
//! approximation with brute-force oracles, and factor-table diagnostics
//! against pairwise repulsive MRFs.
//!
//! All probability mass is handled in the log domain except where greedy
//! selection needs linear-domain differences; those are reduced to Schur
//! complements of an incrementally updated Cholesky factor.

pub mod chol;
pub mod eigen;
pub mod error;
pub mod infer;
pub mod kernel;
pub mod learn;
pub mod mrf;
pub mod naive;
pub mod optim;
pub mod sampler;
pub mod subset;

pub use error::{DppError, Result};
pub use infer::{
    exact_map_bruteforce, greedy_map, mmr_select, sampled_map, BudgetSpec, GreedyMode,
    SelectionResult, SelectionStatus,
};
pub use kernel::{QPhiDecomposition, SymmetricKernel};
pub use learn::{
    build_conditional_l, gradient, log_likelihood, quality, train, ConditionalModel, Instance,
    Item, TrainConfig, TrainOutcome,
};
pub use sampler::{empirical_marginals, SamplerState};
pub use subset::Subset;
