use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("generation {k} out of range 0..={depth}")]
    GenerationOutOfRange { k: usize, depth: usize },
    #[error("scales must satisfy k < n, got k={k}, n={n}")]
    ScaleOrder { k: usize, n: usize },
    #[error("cell index {0} out of range")]
    CellOutOfRange(usize),
    #[error("empty translation set")]
    EmptyKernel,
    #[error("non-finite matrix entries")]
    NonFinite,
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not a projection (defect {0:e})")]
    NotProjection(f64),
    #[error("invalid spectral interval: {0}")]
    InvalidInterval(String),
    #[error("exponent p={0} out of range")]
    ExponentOutOfRange(f64),
    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("weight must be strictly positive (cell {cell} has {value})")]
    NonPositiveWeight { cell: usize, value: f64 },
    #[error("invalid weight parameters: {0}")]
    InvalidWeight(String),
    #[error("no weight with [w]_A1 <= {cap} found after {attempts} attempts")]
    UnreachableCap { cap: f64, attempts: usize },
    #[error("sample budget {0} too small (need at least 100)")]
    SampleBudget(usize),
    #[error("input is not positive semidefinite at cell {cell} (min eigenvalue {min_eig:e})")]
    NotPsd { cell: usize, min_eig: f64 },
    #[error("normalization violated at cell {cell}: E_0(f) has eigenvalue {eig} > lambda = {lambda}")]
    Normalization { cell: usize, eig: f64, lambda: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
