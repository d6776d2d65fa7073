use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid particle count {0}: must be at least 1")]
    InvalidParticleCount(usize),
    #[error("particle count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis is not a unit vector (norm {0})")]
    NonUnitAxis(f64),
    #[error("coherence order {m} out of range for N = {n}")]
    OrderOutOfRange { n: usize, m: i64 },
    #[error("invalid total spin J = {twice_j}/2 for N = {n}")]
    InvalidSpin { n: usize, twice_j: usize },
    #[error("entanglement cluster size {k} out of range for N = {n}")]
    InvalidClusterSize { n: usize, k: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("N = {n} exceeds the brute-force limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("integration did not converge: {0}")]
    Integration(String),
    #[error("sampling grid is not uniform on [0, 2pi)")]
    NonUniformGrid,
    #[error("too few phase samples: {got} < {needed}")]
    TooFewSamples { got: usize, needed: usize },
    #[error("extracted intensity I_{m} = {value:e} is structurally negative")]
    NegativeIntensity { m: i64, value: f64 },
    #[error("Dicke block reconstruction inconsistent (deviation {0:e})")]
    RecursionInconsistent(f64),
    #[error("mean spin vanishes; squeezing parameter undefined")]
    VanishingMeanSpin,
    #[error("backend {backend} cannot run this configuration: {reason}")]
    IncompatibleBackend { backend: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
