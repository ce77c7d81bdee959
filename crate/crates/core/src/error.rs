use thiserror::Error;

/// Errors produced while building models, sectors, operators and states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bath size N = {0} must be an even integer >= 2")]
    OddBathSize(usize),
    #[error("central spin 2S = {two_s} must be at least 1")]
    CentralSpinTooSmall { two_s: u32 },
    #[error("central spin 2S = {two_s} exceeds bath size N = {n}")]
    CentralSpinTooLarge { two_s: u32, n: usize },
    #[error("coupling `{name}` is not finite ({value})")]
    NonFiniteCoupling { name: &'static str, value: f64 },
    #[error("magnetization sector 2m = {two_m} is empty (|2m| > {max})")]
    EmptySector { two_m: i32, max: i32 },
    #[error("sector dimension {dim} exceeds the capacity limit {limit}")]
    CapacityExceeded { dim: usize, limit: usize },
    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),
    #[error("unknown central-spin initial state `{0}` (expected `polarized` or `uniform`)")]
    UnknownKind(String),
    #[error("the intrabath coupling is anisotropic (J = {j}, J' = {jp})")]
    Anisotropic { j: f64, jp: f64 },
    #[error("Lanczos did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Krylov step failed at t = {time}: error estimate {estimate:e} above tolerance {tol:e}")]
    KrylovStepFailed { time: f64, estimate: f64, tol: f64 },
    #[error("state identification failed: {0}")]
    Identification(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
