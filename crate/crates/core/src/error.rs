use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("expected qubit subsystems, got dims {0:?}")]
    NonQubitDims(Vec<usize>),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("box is signalling (worst violation {0:.3e})")]
    Signalling(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),

    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("promise violated: {0}")]
    PromiseViolated(String),

    #[error("quadrature did not reach tolerance (estimated error {0:.3e})")]
    Quadrature(f64),

    #[error("linear program failed: {0}")]
    LinearProgram(String),
}

pub type Result<T> = std::result::Result<T, Error>;
