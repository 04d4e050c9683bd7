use thiserror::Error;

/// Errors raised by the arithmetic and module layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of a non-unit (valuation {0})")]
    NonUnitInverse(u32),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("outside the convergence domain: {0}")]
    ConvergenceDomain(String),
    #[error("operands live in different rings")]
    IncompatibleRings,
    #[error("not divisible: {0}")]
    NonDivisible(String),
    #[error("cannot certify at this precision: {0}")]
    Indeterminate(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("character is odd")]
    OddCharacter,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("norm compatibility fails: {0}")]
    NormFailure(String),
    #[error("not enough layers: {0}")]
    InsufficientLayers(String),
    #[error("measure is not supported on units: {0}")]
    TraceNotZero(String),
    #[error("inadmissible (c,d) pair: {0}")]
    InadmissiblePair(String),
    #[error("symbol has a zero index")]
    ZeroIndex,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cache i/o: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
