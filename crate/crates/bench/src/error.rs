use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("a timing window performed no fitness evaluations")]
    ZeroEvaluations,
    #[error("correlation needs two equally long sequences of at least two values, got {0} and {1}")]
    Lengths(usize, usize),
    #[error("correlation is undefined for a constant sequence")]
    ZeroVariance,
    #[error(transparent)]
    Core(#[from] mst_patches::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
