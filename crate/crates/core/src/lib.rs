//! Reproducible micro-benchmarks for sorting and dictionary routines.
//!
//! Three experiment families are supported: insertion sort against merge
//! sort over small inputs, a threshold sweep of the merge/insertion hybrid,
//! and loop-based insertion and deletion on a hash map and an ordered tree
//! map. Inputs come from a fixed SplitMix64 protocol so a reimplementation in
//! another language can benchmark the exact same data, and results are
//! exchanged through a plain CSV format that the [`report`] module analyses.

pub mod algorithms;
pub mod cli;
pub mod dict_workload;
pub mod error;
pub mod harness;
pub mod prng;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
