//! Baseline store: every individual is a full bit string, every operator
//! copies its parent and evaluates the offspring from scratch.

use rand::seq::index;
use rand::Rng;
use rustc_hash::FxHashMap;

use super::{NodeId, PopulationStore};
use crate::error::{Error, Result};
use crate::fitness::{Evaluator, FitnessValue};
use crate::index_patch::{BitString, IndexSet, Patch};
use crate::operators::CrossoverSpec;

#[derive(Debug)]
struct Individual {
    bits: BitString,
    fitness: FitnessValue,
}

#[derive(Debug)]
pub struct NaiveStore {
    n: usize,
    evaluator: Evaluator,
    individuals: FxHashMap<NodeId, Individual>,
    next_id: u64,
    /// Bit buffers of discarded individuals, reused for offspring.
    spare: Vec<BitString>,
    /// Flip positions of the mutation in progress.
    scratch: IndexSet,
}

impl NaiveStore {
    fn get(&self, id: NodeId) -> Result<&Individual> {
        match self.individuals.get(&id) {
            Some(x) => Ok(x),
            None if id.0 < self.next_id => Err(Error::NodeRemoved(id)),
            None => Err(Error::UnknownNode(id)),
        }
    }

    fn insert(&mut self, bits: BitString) -> Result<NodeId> {
        let fitness = self.evaluator.evaluate(&bits)?;
        let id = NodeId(self.next_id);
        self.next_id += 1;
        self.individuals.insert(id, Individual { bits, fitness });
        Ok(id)
    }

    fn offspring(&mut self, parent: NodeId, flips: &[u32]) -> Result<NodeId> {
        let mut bits = self.spare.pop().unwrap_or_default();
        bits.clone_from(&self.get(parent)?.bits);
        bits.apply_unchecked(flips);
        self.insert(bits)
    }
}

impl PopulationStore for NaiveStore {
    fn create<R: Rng + ?Sized>(n: usize, evaluator: Evaluator, rng: &mut R) -> Result<(Self, NodeId)> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        Self::from_individual(BitString::random(n, rng), evaluator)
    }

    fn from_individual(bits: BitString, evaluator: Evaluator) -> Result<(Self, NodeId)> {
        if bits.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut store = Self {
            n: bits.len(),
            evaluator,
            individuals: FxHashMap::default(),
            next_id: 0,
            spare: Vec::new(),
            scratch: IndexSet::new(bits.len())?,
        };
        let id = store.insert(bits)?;
        Ok((store, id))
    }

    fn bit_len(&self) -> usize {
        self.n
    }

    fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    fn alive_count(&self) -> usize {
        self.individuals.len()
    }

    fn add_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<NodeId> {
        let bits = BitString::random(self.n, rng);
        self.insert(bits)
    }

    fn mutate<R: Rng + ?Sized>(&mut self, parent: NodeId, flips: usize, rng: &mut R) -> Result<NodeId> {
        if flips > self.n {
            return Err(Error::TooManyFlips { flips, n: self.n });
        }
        self.scratch.clear();
        for _ in 0..flips {
            self.scratch.add_random_absent(rng).expect("flips <= n");
        }
        let mut bits = self.spare.pop().unwrap_or_default();
        bits.clone_from(&self.get(parent)?.bits);
        bits.apply_unchecked(self.scratch.members());
        self.insert(bits)
    }

    fn mutate_explicit(&mut self, parent: NodeId, flips: &Patch) -> Result<NodeId> {
        flips.check_bounds(self.n)?;
        self.offspring(parent, flips.as_slice())
    }

    fn crossover<C: CrossoverSpec, R: Rng + ?Sized>(
        &mut self,
        first: NodeId,
        second: NodeId,
        spec: &C,
        rng: &mut R,
    ) -> Result<NodeId> {
        let a = &self.get(first)?.bits;
        let b = &self.get(second)?.bits;
        let (differ, agree): (Vec<u32>, Vec<u32>) =
            (0..self.n as u32).partition(|&i| a.as_slice()[i as usize] != b.as_slice()[i as usize]);
        let d = differ.len();
        let (differing, same) = spec.sample(d, self.n, rng);
        if differing > d || same > self.n - d {
            return Err(Error::CrossoverOutOfRange {
                differing,
                same,
                distance: d,
                n: self.n,
            });
        }
        let mut flips: Vec<u32> = index::sample(rng, d, differing)
            .into_iter()
            .map(|i| differ[i])
            .collect();
        flips.extend(index::sample(rng, agree.len(), same).into_iter().map(|i| agree[i]));
        self.offspring(first, &flips)
    }

    fn difference(&mut self, a: NodeId, b: NodeId) -> Result<Patch> {
        self.get(a)?.bits.difference(&self.get(b)?.bits)
    }

    fn discard(&mut self, x: NodeId) -> Result<()> {
        self.get(x)?;
        if self.individuals.len() == 1 {
            return Err(Error::LastAlive(x));
        }
        if let Some(gone) = self.individuals.remove(&x) {
            self.spare.push(gone.bits);
        }
        Ok(())
    }

    fn fitness(&self, x: NodeId) -> Result<FitnessValue> {
        Ok(self.get(x)?.fitness)
    }

    fn is_alive(&self, x: NodeId) -> Result<bool> {
        match self.get(x) {
            Ok(_) => Ok(true),
            Err(Error::NodeRemoved(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Prim's algorithm over all pairwise distances; quadratic in the
    /// population and linear in `n`. Meant for tests, not timing.
    fn total_patch_size(&self) -> u64 {
        let mut ids: Vec<NodeId> = self.individuals.keys().copied().collect();
        ids.sort_unstable();
        let bits: Vec<&BitString> = ids.iter().map(|id| &self.individuals[id].bits).collect();
        let k = bits.len();
        let mut in_tree = vec![false; k];
        let mut best = vec![usize::MAX; k];
        best[0] = 0;
        let mut total = 0;
        for _ in 0..k {
            let u = (0..k)
                .filter(|&i| !in_tree[i])
                .min_by_key(|&i| best[i])
                .unwrap();
            in_tree[u] = true;
            total += best[u] as u64;
            for v in 0..k {
                if !in_tree[v] {
                    best[v] = best[v].min(bits[u].hamming(bits[v]));
                }
            }
        }
        total
    }

    fn bits_of(&mut self, x: NodeId) -> Result<BitString> {
        Ok(self.get(x)?.bits.clone())
    }
}
