//! Hypergraph product quantum LDPC codes and their decoders.
//!
//! The crate builds CSS codes from random biregular factor graphs, decodes
//! them with small-set-flip under independent X/Z noise, and estimates block
//! logical error rates by Monte Carlo. A toric code with an exact matching
//! decoder serves as the baseline.
//!
//! Module map:
//!
//! - [`gf2`]: bit vectors and sparse matrices over GF(2)
//! - [`graph`]: configuration-model graphs and expansion audits
//! - [`classical`]: classical codes and the flip decoder
//! - [`hgp`]: the hypergraph product and small-code oracles
//! - [`ssf`]: the small-set-flip decoder
//! - [`toric`]: toric code and minimum-weight matching
//! - [`sim`]: noise, trials, sweeps, thresholds and reporting

pub mod classical;
pub mod combinatorics;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod hgp;
pub mod rng;
pub mod sim;
pub mod ssf;
pub mod stats;
pub mod toric;

pub use error::{Error, Result};
pub use gf2::{BitVector, SparseBitMatrix};
pub use graph::BiregularBipartiteGraph;
