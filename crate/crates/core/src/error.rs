use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberTheoryError {
    #[error("prime power index must be at least 1")]
    ZeroIndex,
    #[error("argument must be a positive integer")]
    NonPositive,
    #[error("intensity of n = {n} overflows 64-bit arithmetic")]
    Overflow { n: u64 },
    #[error("prime power table holds {len} terms, index {k} requested")]
    TableExhausted { k: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate triangle (doubled area {area:e})")]
    Degenerate { area: f64 },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("affine map is not invertible (determinant {det:e})")]
    Singular { det: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("wedge index {index} out of range ({count} wedges)")]
    WedgeIndex { index: usize, count: usize },
    #[error("insertion rejected: {0}")]
    Rejected(String),
    #[error("invariant broken: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdmissibleError {
    #[error("wedge doubled area must be positive, got {0:e}")]
    NonPositiveArea(f64),
    #[error("negative input {0:e}")]
    Negative(f64),
    #[error("decrement budget must be positive for sampling")]
    ZeroBudget,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("Poisson mean must be finite and non-negative, got {0}")]
    BadMean(f64),
    #[error("intensity must be finite and non-negative, got {0}")]
    BadIntensity(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("step {step}: {source}")]
    Chain { step: usize, source: ChainError },
    #[error("step {step}: {source}")]
    Sampler { step: usize, source: SamplerError },
    #[error("step {step}: {source}")]
    Admissible { step: usize, source: AdmissibleError },
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
    #[error("step {step}: invariant broken: {detail}")]
    Invariant { step: usize, detail: String },
    #[error("wedge {wedge}: {source}")]
    Wedge { wedge: usize, source: Box<ConstructionError> },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Admissible(#[from] AdmissibleError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed sweep row {row}: {detail}")]
    Ingest { row: usize, detail: String },
}
