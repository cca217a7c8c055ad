//! Unbiased variation operators reduced to the numbers they sample.
//!
//! Any unbiased mutation is "pick `ℓ`, flip `ℓ` distinct uniform positions",
//! and any unbiased binary crossover is "given the parents' distance `d`, flip
//! `ℓ_d` of the differing and `ℓ_s` of the agreeing positions in the first
//! parent". The stores take care of the positions; this module only produces
//! the counts.

use rand::Rng;

use crate::error::{Error, Result};

/// Draws from `Bin(n, p)` exactly, in expected `O(np + 1)` time.
///
/// Successes are located by jumping over geometrically distributed runs of
/// failures, so the cost is proportional to the number of successes rather
/// than to `n`. For `p > 1/2` the complement `n - Bin(n, 1 - p)` is drawn.
///
/// ```
/// use mst_patches::operators::sample_binomial;
/// use rand::SeedableRng;
///
/// let mut rng = rand::rngs::StdRng::seed_from_u64(1);
/// assert_eq!(sample_binomial(10, 0.0, &mut rng).unwrap(), 0);
/// assert_eq!(sample_binomial(10, 1.0, &mut rng).unwrap(), 10);
/// assert!(sample_binomial(10, 0.3, &mut rng).unwrap() <= 10);
/// assert!(sample_binomial(10, 1.5, &mut rng).is_err());
/// ```
pub fn sample_binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<usize> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(binomial(n, p, rng))
}

pub(crate) fn binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> usize {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else if p > 0.5 {
        n - geometric_skips(n, 1.0 - p, rng)
    } else {
        geometric_skips(n, p, rng)
    }
}

fn geometric_skips<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> usize {
    let log_q = (-p).ln_1p();
    let mut count = 0;
    let mut remaining = n;
    loop {
        // u in (0, 1]; floor(ln u / ln q) is Geometric(p) on {0, 1, ...}.
        let u = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        if gap >= remaining as f64 {
            return count;
        }
        remaining -= gap as usize + 1;
        count += 1;
    }
}

/// Distribution of the number of bits a mutation flips.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MutationSpec {
    /// Always flip exactly this many bits (RLS uses 1).
    Fixed(usize),
    /// Standard bit mutation with the given per-bit rate.
    Binomial(f64),
}

impl MutationSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            MutationSpec::Fixed(l) if l > n => Err(Error::TooManyFlips { flips: l, n }),
            MutationSpec::Binomial(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::InvalidProbability(p))
            }
            _ => Ok(()),
        }
    }

    /// Samples `ℓ ∈ [0, n]`. Call [`MutationSpec::validate`] first.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> usize {
        match *self {
            MutationSpec::Fixed(l) => l.min(n),
            MutationSpec::Binomial(p) => binomial(n, p, rng),
        }
    }
}

/// Maps the parents' distance `d` to the counts `(ℓ_d, ℓ_s)` of differing and
/// agreeing positions to flip in the first parent.
///
/// Implementations must return `ℓ_d <= d` and `ℓ_s <= n - d`; the stores
/// reject anything else.
pub trait CrossoverSpec {
    fn sample<R: Rng + ?Sized>(&self, d: usize, n: usize, rng: &mut R) -> (usize, usize);
}

impl<F: Fn(usize, usize) -> (usize, usize)> CrossoverSpec for F {
    fn sample<R: Rng + ?Sized>(&self, d: usize, n: usize, _rng: &mut R) -> (usize, usize) {
        self(d, n)
    }
}

/// Uniform crossover followed by standard bit mutation with rate `p_m`:
/// `ℓ_d ~ Bin(d, 1/2)` and `ℓ_s ~ Bin(n - d, p_m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformCrossover {
    pub mutation_rate: f64,
}

impl UniformCrossover {
    pub fn new(mutation_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mutation_rate) {
            return Err(Error::InvalidProbability(mutation_rate));
        }
        Ok(Self { mutation_rate })
    }
}

impl CrossoverSpec for UniformCrossover {
    fn sample<R: Rng + ?Sized>(&self, d: usize, n: usize, rng: &mut R) -> (usize, usize) {
        let differing = binomial(d, 0.5, rng);
        let same = binomial(n - d, self.mutation_rate, rng);
        (differing, same)
    }
}
