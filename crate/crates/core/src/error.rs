use thiserror::Error;

/// Errors raised by model construction, simulation and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coefficient {name}[{index}] = {value}")]
    NonFiniteCoefficient {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("model is not stable: largest pole modulus {max_modulus}")]
    Unstable { max_modulus: f64 },
    #[error("block length {n} too short for AR order {p} (need n >= p + 1)")]
    BlockTooShort { n: usize, p: usize },
    #[error("burn-in diverged: |x| exceeded 1e300 at step {step}")]
    BurnInOverflow { step: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("impulse response of length {len} too short: need index {needed}")]
    InsufficientImpulseLength { len: usize, needed: usize },
    #[error("filter is not proper: {zeros} zeros, {poles} poles")]
    ImproperFilter { zeros: usize, poles: usize },
    #[error("index i = {i} outside the lemma range: {reason}")]
    IndexBelowThreshold { i: usize, reason: String },
    #[error("m-grid must be increasing powers of two with at least 4 points: {0}")]
    InvalidGrid(String),
    #[error("degenerate grid: {usable} usable points")]
    DegenerateGrid { usable: usize },
    #[error("sample starvation: {samples} samples, need at least {required}")]
    SampleStarvation { samples: usize, required: usize },
    #[error("joint quantization infeasible: {0}")]
    InfeasibleProbe(String),
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("atom assignment has {got} values, pattern has {expected} discrete slots")]
    AtomAssignmentMismatch { expected: usize, got: usize },
    #[error("ill-conditioned system: sigma ratio {ratio:e}")]
    IllConditioned { ratio: f64 },
    #[error("model spec line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Whether the error stems from user-supplied configuration rather than a
    /// numerical failure during the run.
    pub fn is_config(&self) -> bool {
        !matches!(
            self,
            Error::BurnInOverflow { .. }
                | Error::DimensionMismatch(_)
                | Error::InsufficientImpulseLength { .. }
                | Error::DegenerateGrid { .. }
                | Error::AtomAssignmentMismatch { .. }
                | Error::IllConditioned { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
