//! Experiment configuration.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use mst_patches::Algorithm;

use crate::error::{BenchError, Result};

/// Largest supported exponent for `n = 2^k`.
pub const K_LIMIT: u32 = 24;
/// Smallest supported exponent.
pub const K_FLOOR: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgorithmName {
    Rls,
    /// (1+1) EA
    Opo,
    /// (2+1) GA
    Mpo2,
    /// (10+1) GA
    Mpo10,
}

impl AlgorithmName {
    pub const ALL: [AlgorithmName; 4] = [Self::Rls, Self::Opo, Self::Mpo2, Self::Mpo10];

    /// The optimizer with its standard parameters for problem size `n`.
    pub fn algorithm(self, n: usize) -> Algorithm {
        match self {
            Self::Rls => Algorithm::Rls,
            Self::Opo => Algorithm::one_plus_one(n),
            Self::Mpo2 => Algorithm::two_plus_one(n),
            Self::Mpo10 => Algorithm::ten_plus_one(n),
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for AlgorithmName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rls => "rls",
            Self::Opo => "opo",
            Self::Mpo2 => "mpo2",
            Self::Mpo10 => "mpo10",
        })
    }
}

impl FromStr for AlgorithmName {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown algorithm {s:?}; expected rls, opo, mpo2 or mpo10")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StoreKind {
    Mst,
    Naive,
}

impl StoreKind {
    pub const ALL: [StoreKind; 2] = [Self::Mst, Self::Naive];
}

impl fmt::Display for StoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mst => "mst",
            Self::Naive => "naive",
        })
    }
}

impl FromStr for StoreKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mst" => Ok(Self::Mst),
            "naive" => Ok(Self::Naive),
            _ => Err(BenchError::Config(format!("unknown store {s:?}; expected mst or naive"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    OneMax,
    Knapsack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// OneMax, `n = 2^k`, every run until the optimum.
    OnemaxScaling,
    /// Random knapsack instances, `n = 2^k`, fixed evaluation budget.
    KnapsackBudget,
    /// One (10+1) GA run on a knapsack instance, checkpointed.
    KnapsackTrace,
}

impl Experiment {
    pub fn problem(self) -> Problem {
        match self {
            Self::OnemaxScaling => Problem::OneMax,
            Self::KnapsackBudget | Self::KnapsackTrace => Problem::Knapsack,
        }
    }
}

/// Settings for the two scaling experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub experiment: Experiment,
    pub algorithms: Vec<AlgorithmName>,
    pub stores: Vec<StoreKind>,
    pub k_min: u32,
    pub k_max: u32,
    /// Evaluation budget per run; `None` runs to the optimum.
    pub budget: Option<u64>,
    pub seed: u64,
    pub windows: usize,
    pub window: Duration,
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.experiment == Experiment::KnapsackTrace {
            return Err(BenchError::Config("the trace experiment is not a scaling experiment".into()));
        }
        if self.k_min < K_FLOOR || self.k_max > K_LIMIT || self.k_min > self.k_max {
            return Err(BenchError::Config(format!(
                "k range {}..={} must lie within {K_FLOOR}..={K_LIMIT}",
                self.k_min, self.k_max
            )));
        }
        if self.algorithms.is_empty() || self.stores.is_empty() {
            return Err(BenchError::Config("need at least one algorithm and one store".into()));
        }
        if self.windows == 0 {
            return Err(BenchError::Config("need at least one timing window".into()));
        }
        if self.window.is_zero() {
            return Err(BenchError::Config("window length must be positive".into()));
        }
        match (self.experiment, self.budget) {
            (Experiment::KnapsackBudget, None | Some(0)) => {
                Err(BenchError::Config("knapsack runs need a positive budget".into()))
            }
            (Experiment::OnemaxScaling, Some(_)) => {
                Err(BenchError::Config("OneMax scaling runs to the optimum and takes no budget".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Settings for the diversity trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig {
    pub n: usize,
    pub budget: u64,
    pub stride: u64,
    pub seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            budget: 100_000,
            stride: 10,
            seed: 0,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.budget == 0 || self.stride == 0 {
            return Err(BenchError::Config("n, budget and stride must be positive".into()));
        }
        if !self.budget.is_multiple_of(self.stride) {
            return Err(BenchError::Config(format!(
                "budget {} is not a multiple of the stride {}",
                self.budget, self.stride
            )));
        }
        Ok(())
    }
}

/// The splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one experiment cell, derived from the master seed and the cell's
/// coordinates.
pub fn cell_seed(seed: u64, algorithm: AlgorithmName, store: StoreKind, n: usize) -> u64 {
    mix(mix(mix(seed) ^ algorithm.index()) ^ ((store as u64) << 8)) ^ mix(n as u64)
}

/// Seed of the problem instance at size `n`, shared by all cells of that size.
pub fn instance_seed(seed: u64, n: usize) -> u64 {
    mix(mix(seed ^ 0x6b6e_6170_7361_636b) ^ n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaling() -> ScalingConfig {
        ScalingConfig {
            experiment: Experiment::OnemaxScaling,
            algorithms: AlgorithmName::ALL.to_vec(),
            stores: StoreKind::ALL.to_vec(),
            k_min: 5,
            k_max: 13,
            budget: None,
            seed: 1,
            windows: 10,
            window: Duration::from_secs(1),
        }
    }

    #[test]
    fn names_round_trip() {
        for a in AlgorithmName::ALL {
            assert_eq!(a.to_string().parse::<AlgorithmName>().unwrap(), a);
        }
        for s in StoreKind::ALL {
            assert_eq!(s.to_string().parse::<StoreKind>().unwrap(), s);
        }
        assert!("ga".parse::<AlgorithmName>().is_err());
        assert!("tree".parse::<StoreKind>().is_err());
    }

    #[test]
    fn validation() {
        scaling().validate().unwrap();
        for bad in [
            ScalingConfig { k_min: 4, ..scaling() },
            ScalingConfig { k_max: 25, ..scaling() },
            ScalingConfig { k_min: 9, k_max: 8, ..scaling() },
            ScalingConfig { windows: 0, ..scaling() },
            ScalingConfig { window: Duration::ZERO, ..scaling() },
            ScalingConfig { algorithms: vec![], ..scaling() },
            ScalingConfig { budget: Some(10), ..scaling() },
            ScalingConfig { experiment: Experiment::KnapsackBudget, ..scaling() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        ScalingConfig { experiment: Experiment::KnapsackBudget, budget: Some(25_000), k_max: 24, ..scaling() }
            .validate()
            .unwrap();
        assert!(TraceConfig { budget: 105, ..TraceConfig::default() }.validate().is_err());
        TraceConfig::default().validate().unwrap();
    }

    #[test]
    fn cell_seeds_differ() {
        let mut seen = std::collections::HashSet::new();
        for a in AlgorithmName::ALL {
            for s in StoreKind::ALL {
                for k in 5..=24 {
                    assert!(seen.insert(cell_seed(7, a, s, 1 << k)));
                }
            }
        }
        assert_eq!(cell_seed(7, AlgorithmName::Rls, StoreKind::Mst, 32), cell_seed(7, AlgorithmName::Rls, StoreKind::Mst, 32));
    }
}
