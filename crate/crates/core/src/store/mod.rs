//! Population stores.
//!
//! [`PopulationTree`] keeps a single complete individual and links every
//! other individual to it through a minimum spanning tree of patches.
//! [`NaiveStore`] keeps every individual as a full bit string. Both implement
//! [`PopulationStore`], and both hand out the same [`NodeId`] sequence, so the
//! optimizers can run unchanged on either.

use std::fmt;

use rand::Rng;

use crate::error::Result;
use crate::fitness::{Evaluator, FitnessValue};
use crate::index_patch::{BitString, Patch};
use crate::operators::CrossoverSpec;

mod naive;
mod tree;

pub use naive::NaiveStore;
pub use tree::PopulationTree;

/// Handle of an individual. Ids increase monotonically and are never reused
/// within one store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The operations an optimizer needs from a population.
///
/// Operator outputs are always new individuals; parents are left in place
/// until [`discard`](PopulationStore::discard)ed.
pub trait PopulationStore: Sized {
    /// Creates a store holding one uniformly random individual.
    fn create<R: Rng + ?Sized>(n: usize, evaluator: Evaluator, rng: &mut R) -> Result<(Self, NodeId)>;

    /// Creates a store holding `bits`.
    fn from_individual(bits: BitString, evaluator: Evaluator) -> Result<(Self, NodeId)>;

    /// Length of the bit strings.
    fn bit_len(&self) -> usize;

    fn evaluator(&self) -> &Evaluator;

    /// Number of individuals not yet discarded.
    fn alive_count(&self) -> usize;

    /// Adds an individual distributed uniformly over all bit strings.
    fn add_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<NodeId>;

    /// Flips `flips` distinct uniformly chosen bits of `parent`.
    fn mutate<R: Rng + ?Sized>(&mut self, parent: NodeId, flips: usize, rng: &mut R)
        -> Result<NodeId>;

    /// Flips exactly the positions in `flips`.
    fn mutate_explicit(&mut self, parent: NodeId, flips: &Patch) -> Result<NodeId>;

    /// Unbiased crossover: `spec` receives the parents' distance `d` and
    /// returns how many differing and agreeing positions of `first` to flip.
    fn crossover<C: CrossoverSpec, R: Rng + ?Sized>(
        &mut self,
        first: NodeId,
        second: NodeId,
        spec: &C,
        rng: &mut R,
    ) -> Result<NodeId>;

    /// Positions where the two individuals differ.
    fn difference(&mut self, a: NodeId, b: NodeId) -> Result<Patch>;

    /// Removes an individual from the population.
    fn discard(&mut self, x: NodeId) -> Result<()>;

    fn fitness(&self, x: NodeId) -> Result<FitnessValue>;

    /// `Ok(false)` once `x` has been discarded, even after it is physically gone.
    fn is_alive(&self, x: NodeId) -> Result<bool>;

    /// Diversity measure: the total size of the patches of a minimum spanning
    /// tree over the stored individuals.
    fn total_patch_size(&self) -> u64;

    /// Materializes an individual.
    fn bits_of(&mut self, x: NodeId) -> Result<BitString>;
}
