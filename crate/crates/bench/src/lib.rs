//! Benchmarks for the population stores: wall-clock scaling on OneMax and
//! knapsack, and a diversity trace relating total patch size to operation
//! time.
//!
//! Every timing is taken over warm windows; see [`timing::timed_windows`].

pub mod config;
pub mod error;
pub mod experiments;
pub mod stats;
pub mod timing;

pub use config::{AlgorithmName, Experiment, ScalingConfig, StoreKind, TraceConfig};
pub use error::{BenchError, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/benchmarks.md")]
mod book {}
