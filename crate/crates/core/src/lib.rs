//! Resolvent statistics of non-Hermitian random matrices.
//!
//! The crate provides the exact finite-N law of the resolvent diagonal
//! `[(z - M)^{-1}]_{11}` for complex Ginibre matrices, its large-N limits in
//! the bulk, near the spectral edge and outside the spectrum, samplers for
//! several rotationally invariant ensembles, eigenvector self-overlaps, and a
//! set of heavy-tail-aware statistics for comparing Monte Carlo output with
//! these laws.

// `!(x > 0.0)` is used deliberately so that NaN parameters are rejected;
// reference constants keep the digits they were computed with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod batch;
pub mod densities;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod overlaps;
pub mod pool;
pub mod quadrature;
pub mod resolvent;
pub mod rng;
pub mod special;
pub mod stats;

pub use batch::{SampleBatch, Statistic};
pub use densities::DistributionModel;
pub use ensembles::EnsembleSpec;
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentKind, ExperimentReport};
pub use matrix::ComplexMatrix;
pub use resolvent::RegimeSpec;
