//! Full and incremental fitness evaluation for OneMax and the 0-1 knapsack
//! problem.
//!
//! Knapsack fitness is kept as the pair `(total weight, total value)` rather
//! than a scalar, because that pair is what an incremental update can maintain
//! cheaply. The order between two pairs is induced by a scalar key: the total
//! value for feasible selections and the negated total weight otherwise, so
//! every feasible selection beats every infeasible one and infeasible ones are
//! pushed towards lighter selections.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::index_patch::BitString;

/// Lower bound of generated weights and values.
pub const ITEM_MIN: i64 = 10_000;
/// Upper bound (inclusive) of generated weights and values.
pub const ITEM_MAX: i64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FitnessValue {
    OneMax(u64),
    Knapsack { weight: i64, value: i64 },
}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessValue::OneMax(c) => write!(f, "{c}"),
            FitnessValue::Knapsack { weight, value } => write!(f, "({weight},{value})"),
        }
    }
}

pub fn onemax_full(bits: &BitString) -> FitnessValue {
    FitnessValue::OneMax(bits.count_ones() as u64)
}

/// Updates a OneMax value after the positions in `flipped` changed.
/// `new_bits` must already hold the post-flip values.
pub fn onemax_delta(old: FitnessValue, flipped: &[u32], new_bits: &BitString) -> FitnessValue {
    let FitnessValue::OneMax(count) = old else {
        panic!("onemax_delta called with {old:?}");
    };
    let bits = new_bits.as_slice();
    let ones = flipped.iter().filter(|&&i| bits[i as usize]).count() as u64;
    let zeros = flipped.len() as u64 - ones;
    FitnessValue::OneMax(count + ones - zeros)
}

/// A 0-1 knapsack instance with integer weights and values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackInstance {
    weights: Vec<i64>,
    values: Vec<i64>,
    capacity: i64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<i64>, values: Vec<i64>, capacity: i64) -> Result<Self> {
        if weights.len() != values.len() {
            return Err(Error::InvalidInstance(format!(
                "{} weights but {} values",
                weights.len(),
                values.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidInstance("no items".into()));
        }
        if capacity < 0 {
            return Err(Error::InvalidInstance(format!("negative capacity {capacity}")));
        }
        if let Some(w) = weights.iter().chain(&values).find(|&&x| x <= 0) {
            return Err(Error::InvalidInstance(format!("non-positive item entry {w}")));
        }
        Ok(Self {
            weights,
            values,
            capacity,
        })
    }

    /// Uncorrelated instance: weights and values uniform in
    /// `[ITEM_MIN, ITEM_MAX]`, capacity half the total weight (rounded down).
    pub fn generate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1, "instance needs at least one item");
        let mut weights = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            weights.push(rng.random_range(ITEM_MIN..=ITEM_MAX));
            values.push(rng.random_range(ITEM_MIN..=ITEM_MAX));
        }
        let capacity = weights.iter().sum::<i64>() / 2;
        Self {
            weights,
            values,
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    /// Reads the text format: a header `n capacity`, then `n` lines of
    /// `weight value`.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let bad = |msg: String| Error::InvalidInstance(msg);
        let mut numbers = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            for tok in line.split_whitespace() {
                numbers.push(
                    tok.parse::<i64>()
                        .map_err(|e| bad(format!("{tok:?}: {e}")))?,
                );
            }
        }
        let (&n, rest) = numbers.split_first().ok_or_else(|| bad("empty input".into()))?;
        let (&capacity, items) = rest
            .split_first()
            .ok_or_else(|| bad("missing capacity".into()))?;
        if n < 0 || items.len() as i64 != 2 * n {
            return Err(bad(format!(
                "header declares {n} items but {} numbers follow",
                items.len()
            )));
        }
        let weights = items.iter().step_by(2).copied().collect();
        let values = items.iter().skip(1).step_by(2).copied().collect();
        Self::new(weights, values, capacity)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.capacity)?;
        for (w, v) in self.weights.iter().zip(&self.values) {
            writeln!(out, "{w} {v}")?;
        }
        Ok(())
    }
}

pub fn knapsack_full(bits: &BitString, inst: &KnapsackInstance) -> Result<FitnessValue> {
    if bits.len() != inst.len() {
        return Err(Error::LengthMismatch {
            expected: inst.len(),
            actual: bits.len(),
        });
    }
    let (mut weight, mut value) = (0i64, 0i64);
    for ((&b, &w), &v) in bits.as_slice().iter().zip(&inst.weights).zip(&inst.values) {
        if b {
            weight += w;
            value += v;
        }
    }
    Ok(FitnessValue::Knapsack { weight, value })
}

/// Updates the knapsack sums after the positions in `flipped` changed.
/// `new_bits` must already hold the post-flip values.
pub fn knapsack_delta(
    old: FitnessValue,
    flipped: &[u32],
    new_bits: &BitString,
    inst: &KnapsackInstance,
) -> FitnessValue {
    let FitnessValue::Knapsack {
        mut weight,
        mut value,
    } = old
    else {
        panic!("knapsack_delta called with {old:?}");
    };
    let bits = new_bits.as_slice();
    for &i in flipped {
        let i = i as usize;
        if bits[i] {
            weight += inst.weights[i];
            value += inst.values[i];
        } else {
            weight -= inst.weights[i];
            value -= inst.values[i];
        }
    }
    FitnessValue::Knapsack { weight, value }
}

/// The scalar that orders knapsack pairs.
pub fn knapsack_key(f: FitnessValue, capacity: i64) -> Result<i64> {
    match f {
        FitnessValue::Knapsack { weight, value } if weight <= capacity => Ok(value),
        FitnessValue::Knapsack { weight, .. } => Ok(-weight),
        FitnessValue::OneMax(_) => Err(Error::MixedFitness),
    }
}

pub fn knapsack_compare(a: FitnessValue, b: FitnessValue, capacity: i64) -> Result<Ordering> {
    Ok(knapsack_key(a, capacity)?.cmp(&knapsack_key(b, capacity)?))
}

/// A problem together with its instance data. Cheap to clone.
#[derive(Clone, Debug)]
pub enum Evaluator {
    OneMax,
    Knapsack(Arc<KnapsackInstance>),
}

impl Evaluator {
    pub fn knapsack(inst: KnapsackInstance) -> Self {
        Evaluator::Knapsack(Arc::new(inst))
    }

    /// Problem size, if the problem fixes one.
    pub fn problem_size(&self) -> Option<usize> {
        match self {
            Evaluator::OneMax => None,
            Evaluator::Knapsack(inst) => Some(inst.len()),
        }
    }

    pub fn evaluate(&self, bits: &BitString) -> Result<FitnessValue> {
        match self {
            Evaluator::OneMax => Ok(onemax_full(bits)),
            Evaluator::Knapsack(inst) => knapsack_full(bits, inst),
        }
    }

    /// Incremental evaluation; see [`onemax_delta`] and [`knapsack_delta`].
    pub fn delta(&self, old: FitnessValue, flipped: &[u32], new_bits: &BitString) -> FitnessValue {
        match self {
            Evaluator::OneMax => onemax_delta(old, flipped, new_bits),
            Evaluator::Knapsack(inst) => knapsack_delta(old, flipped, new_bits, inst),
        }
    }

    /// Total order on fitness values of this problem; larger is better.
    pub fn compare(&self, a: FitnessValue, b: FitnessValue) -> Result<Ordering> {
        match (self, a, b) {
            (Evaluator::OneMax, FitnessValue::OneMax(x), FitnessValue::OneMax(y)) => Ok(x.cmp(&y)),
            (Evaluator::Knapsack(inst), _, _) => knapsack_compare(a, b, inst.capacity),
            _ => Err(Error::MixedFitness),
        }
    }

    /// The best value reachable, when it is known in closed form.
    pub fn optimum(&self, n: usize) -> Option<FitnessValue> {
        match self {
            Evaluator::OneMax => Some(FitnessValue::OneMax(n as u64)),
            Evaluator::Knapsack(_) => None,
        }
    }
}
