use thiserror::Error;

use crate::store::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("universe size must be positive")]
    EmptyUniverse,
    #[error("index {index} is out of range for a universe of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("patch indices must be strictly increasing (found {next} after {prev})")]
    UnsortedPatch { prev: u32, next: u32 },
    #[error("invalid character {found:?} at position {position}")]
    InvalidBit { position: usize, found: char },
    #[error("the index set is full")]
    SetFull,
    #[error("cannot add {add} and remove {remove} elements from a set of size {size} over {n}")]
    FlipOutOfRange {
        add: usize,
        remove: usize,
        size: usize,
        n: usize,
    },
    #[error("bit string has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("cannot compare fitness values of different problems")]
    MixedFitness,
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cannot flip {flips} bits of a {n}-bit string")]
    TooManyFlips { flips: usize, n: usize },
    #[error("crossover counts ({differing}, {same}) out of range for distance {distance} and length {n}")]
    CrossoverOutOfRange {
        differing: usize,
        same: usize,
        distance: usize,
        n: usize,
    },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} has been removed from the store")]
    NodeRemoved(NodeId),
    #[error("node {0} has been discarded")]
    NodeDiscarded(NodeId),
    #[error("node {0} is the last alive individual")]
    LastAlive(NodeId),
    #[error("population size must be positive")]
    EmptyPopulation,
    #[error("evaluation budget must be positive")]
    EmptyBudget,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}
