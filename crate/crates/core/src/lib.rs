//! Block-structure detection in sparse bipartite graphs.
//!
//! The four-point test samples disjoint groups of four edges, reads off the
//! relative order of their endpoints as one of 24 patterns, and measures how
//! far the pattern frequencies are from uniform. Spectral natural orderings
//! expose latent blocks so the test can see them; the synthetic generators
//! and likelihood-ratio statistics reproduce the surrounding experiments.

pub mod error;
pub mod fourpoint;
pub mod generators;
pub mod graph;
pub mod lrstat;
pub mod ordering;
pub mod permpattern;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
