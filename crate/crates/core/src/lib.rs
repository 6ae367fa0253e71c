//! Decentralized non-parametric regression at desk scale: a network of agents
//! runs synchronous full-batch gradient descent with random features over a
//! doubly stochastic gossip matrix, next to a pooled single-machine baseline.
//!
//! The crate is organized around the pipeline:
//!
//! - [`features`]: sample and apply random feature maps, exact kernels, and
//!   empirical covariance operators.
//! - [`topology`]: communication graphs, mixing matrices, spectral gap and
//!   mixing diagnostics.
//! - [`data`]: synthetic data with planted ground truth, CSV ingestion, and
//!   i.i.d. sharding across agents.
//! - [`engine`]: the distributed and centralized training loops producing
//!   checkpointed weight traces.
//! - [`analysis`]: trace evaluation, optimal stopping, network-error tables,
//!   and the runtime speed-up formula.
//! - [`theory`]: parameter prescriptions, leading-order error terms,
//!   effective dimension, and lemma-level numerical verifiers.
//!
//! Everything is deterministic given seeds: feature maps, shards, traces and
//! evaluation reports reproduce bit-for-bit.

// `!(x > 0.0)` rejects NaN along with nonpositive values; keep the idiom.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod data;
pub mod engine;
pub mod error;
pub mod features;
pub mod theory;
pub mod topology;

pub use error::{Error, Result};
