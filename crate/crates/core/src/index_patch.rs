//! Bit strings, immutable patches, and the permutation-backed mutable index set.
//!
//! A [`Patch`] is the sorted list of bit positions that turns one individual
//! into another. For bit strings the same patch works in both directions, so
//! the edges of the population tree carry one patch each.
//!
//! An [`IndexSet`] is the scratch structure that every store operation works
//! through. It keeps a permutation `perm` of `0..n` together with its inverse
//! and a size `s`; the members are exactly `perm[0..s]`. That layout gives
//! O(1) toggling and membership tests, and O(1) uniform sampling of absent or
//! present elements by swapping within the permutation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// A fixed-length string of bits; the genotype.
#[derive(PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl Clone for BitString {
    fn clone(&self) -> Self {
        Self {
            bits: self.bits.clone(),
        }
    }

    /// Reuses the existing allocation.
    fn clone_from(&mut self, source: &Self) {
        self.bits.clone_from(&source.bits);
    }
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    /// Samples every bit independently and uniformly.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..n).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<bool> {
        self.bits.get(index).copied().ok_or(Error::IndexOutOfRange {
            index,
            n: self.bits.len(),
        })
    }

    pub fn flip(&mut self, index: usize) -> Result<()> {
        let n = self.bits.len();
        let bit = self
            .bits
            .get_mut(index)
            .ok_or(Error::IndexOutOfRange { index, n })?;
        *bit = !*bit;
        Ok(())
    }

    pub fn count_ones(&self) -> usize {
        // Byte sums over short chunks vectorize; filter-and-count does not.
        self.bits
            .chunks(255)
            .map(|c| c.iter().fold(0u8, |acc, &b| acc + b as u8) as usize)
            .sum()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Flips every position listed in `patch`.
    ///
    /// Applying the same patch twice restores the original string. Bounds are
    /// checked before anything is flipped, so an error leaves `self` intact.
    pub fn apply(&mut self, patch: &Patch) -> Result<()> {
        patch.check_bounds(self.len())?;
        self.apply_unchecked(patch.as_slice());
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, indices: &[u32]) {
        for &i in indices {
            let bit = &mut self.bits[i as usize];
            *bit = !*bit;
        }
    }

    /// Positions at which `self` and `other` differ.
    pub fn difference(&self, other: &BitString) -> Result<Patch> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let indices = self
            .bits
            .iter()
            .zip(&other.bits)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i as u32)
            .collect();
        Ok(Patch { indices })
    }

    pub fn hamming(&self, other: &BitString) -> usize {
        self.bits
            .chunks(255)
            .zip(other.bits.chunks(255))
            .map(|(x, y)| x.iter().zip(y).fold(0u8, |acc, (&a, &b)| acc + (a ^ b) as u8) as usize)
            .sum()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(Error::InvalidBit { position: i, found }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// An immutable, strictly increasing set of bit positions to flip.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Patch {
    indices: Box<[u32]>,
}

impl Patch {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a patch from indices that are already strictly increasing.
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::UnsortedPatch {
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(Self {
            indices: indices.into(),
        })
    }

    /// Sorts `indices` first; duplicates are still an error.
    pub fn from_unsorted(mut indices: Vec<u32>) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|&i| i as usize)
    }

    pub fn contains(&self, index: usize) -> bool {
        u32::try_from(index).is_ok_and(|i| self.indices.binary_search(&i).is_ok())
    }

    /// Fails if any index is `>= n`. Only the last index needs checking.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last as usize >= n => Err(Error::IndexOutOfRange {
                index: last as usize,
                n,
            }),
            _ => Ok(()),
        }
    }

    /// Symmetric difference of two patches.
    pub fn combine(&self, other: &Patch) -> Patch {
        let (a, b) = (&self.indices, &other.indices);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Patch {
            indices: out.into(),
        }
    }
}

impl AsRef<[u32]> for Patch {
    fn as_ref(&self) -> &[u32] {
        &self.indices
    }
}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices.iter()).finish()
    }
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// The mutable patch: a subset of `0..n` with O(1) updates and sampling.
#[derive(Clone, Debug)]
pub struct IndexSet {
    perm: Vec<u32>,
    inv: Vec<u32>,
    size: usize,
}

impl IndexSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        assert!(n <= u32::MAX as usize, "universe too large: {n}");
        let identity: Vec<u32> = (0..n as u32).collect();
        Ok(Self {
            perm: identity.clone(),
            inv: identity,
            size: 0,
        })
    }

    /// Size of the universe.
    pub fn universe(&self) -> usize {
        self.perm.len()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn clear(&mut self) {
        self.size = 0;
    }

    /// Members in internal order (not sorted).
    pub fn members(&self) -> &[u32] {
        &self.perm[..self.size]
    }

    fn check(&self, e: usize) -> Result<()> {
        if e < self.perm.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: e,
                n: self.perm.len(),
            })
        }
    }

    pub fn contains(&self, e: usize) -> Result<bool> {
        self.check(e)?;
        Ok(self.contains_unchecked(e as u32))
    }

    #[inline]
    fn contains_unchecked(&self, e: u32) -> bool {
        (self.inv[e as usize] as usize) < self.size
    }

    #[inline]
    fn swap_positions(&mut self, i: usize, j: usize) {
        let (a, b) = (self.perm[i], self.perm[j]);
        self.perm[i] = b;
        self.perm[j] = a;
        self.inv[b as usize] = i as u32;
        self.inv[a as usize] = j as u32;
    }

    pub fn toggle(&mut self, e: usize) -> Result<()> {
        self.check(e)?;
        self.toggle_unchecked(e as u32);
        Ok(())
    }

    #[inline]
    pub(crate) fn toggle_unchecked(&mut self, e: u32) {
        let pos = self.inv[e as usize] as usize;
        if pos < self.size {
            self.size -= 1;
            self.swap_positions(pos, self.size);
        } else {
            self.swap_positions(pos, self.size);
            self.size += 1;
        }
    }

    /// Adds one element chosen uniformly among the absent ones and returns it.
    pub fn add_random_absent<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let n = self.perm.len();
        if self.size == n {
            return Err(Error::SetFull);
        }
        let j = rng.random_range(self.size..n);
        self.swap_positions(self.size, j);
        self.size += 1;
        Ok(self.perm[self.size - 1] as usize)
    }

    /// Adds `n_add` uniformly chosen absent elements and removes `n_remove`
    /// uniformly chosen present elements, simultaneously: an element removed
    /// here is never re-added and an element added here is never removed.
    pub fn flip_random<R: Rng + ?Sized>(
        &mut self,
        n_add: usize,
        n_remove: usize,
        rng: &mut R,
    ) -> Result<()> {
        let n = self.perm.len();
        let s0 = self.size;
        if n_add > n - s0 || n_remove > s0 {
            return Err(Error::FlipOutOfRange {
                add: n_add,
                remove: n_remove,
                size: s0,
                n,
            });
        }
        // Additions go to perm[s0..s0 + n_add], drawn from the original absents.
        for i in 0..n_add {
            let j = rng.random_range(s0 + i..n);
            self.swap_positions(s0 + i, j);
        }
        // Removals are drawn from the original members perm[0..s0] and parked
        // at its tail, perm[s0 - n_remove..s0].
        for i in 0..n_remove {
            let last = s0 - 1 - i;
            let j = rng.random_range(0..=last);
            self.swap_positions(j, last);
        }
        // Rotate the parked block past the added block.
        let start = s0 - n_remove;
        let end = s0 + n_add;
        for k in 0..n_remove.min(n_add) {
            self.swap_positions(start + k, end - 1 - k);
        }
        self.size = s0 + n_add - n_remove;
        Ok(())
    }

    /// Toggles every index of `patch`: the set becomes the symmetric
    /// difference of itself and the patch.
    pub fn merge(&mut self, patch: &Patch) -> Result<()> {
        patch.check_bounds(self.perm.len())?;
        self.merge_unchecked(patch.as_slice());
        Ok(())
    }

    #[inline]
    pub(crate) fn merge_unchecked(&mut self, indices: &[u32]) {
        for &e in indices {
            self.toggle_unchecked(e);
        }
    }

    /// An immutable copy of the current members.
    pub fn snapshot(&self) -> Patch {
        let mut indices = self.members().to_vec();
        indices.sort_unstable();
        Patch {
            indices: indices.into(),
        }
    }

    #[cfg(test)]
    fn check_invariants(&self) {
        for (i, &p) in self.perm.iter().enumerate() {
            assert_eq!(self.inv[p as usize] as usize, i);
        }
        assert!(self.size <= self.perm.len());
    }
}
