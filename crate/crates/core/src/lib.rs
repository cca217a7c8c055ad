//! Population storage for bit-string genetic algorithms as a minimum spanning
//! tree of patches.
//!
//! Instead of one bit string per individual, a [`PopulationTree`] stores a
//! single *complete individual* and connects all individuals by edges labeled
//! with the sets of bit positions in which they differ. The edges form a
//! minimum spanning tree under Hamming distance, so the memory and time spent
//! on the population shrink as the population converges. Combined with
//! incremental fitness evaluation, mutation and crossover then cost time
//! proportional to the population's diversity rather than to the problem
//! size.
//!
//! ```
//! use mst_patches::{Algorithm, Evaluator, FitnessValue, PopulationTree, RunOptions, StopCondition};
//! use rand::SeedableRng;
//!
//! let mut rng = rand::rngs::StdRng::seed_from_u64(42);
//! let n = 256;
//! let options = RunOptions::new(StopCondition::Target(FitnessValue::OneMax(n as u64)));
//! let (trace, _store) = Algorithm::two_plus_one(n)
//!     .run::<PopulationTree, _>(n, Evaluator::OneMax, &options, &mut rng)
//!     .unwrap();
//! assert_eq!(trace.best, FitnessValue::OneMax(n as u64));
//! ```
//!
//! The guide in `book/` walks through the data structure chapter by chapter;
//! its code listings are compiled and run as doc tests of this crate.

pub mod algorithms;
pub mod error;
pub mod fitness;
pub mod index_patch;
pub mod operators;
pub mod store;

pub use algorithms::{Algorithm, RunOptions, RunTrace, Sampling, StopCondition};
pub use error::{Error, Result};
pub use fitness::{Evaluator, FitnessValue, KnapsackInstance};
pub use index_patch::{BitString, IndexSet, Patch};
pub use store::{NaiveStore, NodeId, PopulationStore, PopulationTree};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/patches.md")]
    mod patches {}
    #[doc = include_str!("../../../book/src/fitness.md")]
    mod fitness {}
    #[doc = include_str!("../../../book/src/tree.md")]
    mod tree {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    mod algorithms {}
}
