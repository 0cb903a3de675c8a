use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QlutError {
    #[error("{name} = {value} is not a power of two")]
    NonPowerOfTwo { name: &'static str, value: u64 },
    #[error("ordering violation: {0}")]
    OrderingViolation(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("long-range budget k = {k} outside [0, {max}]")]
    KOutOfRange { k: u32, max: u32 },
    #[error("rate {name} = {value} outside [0, 1]")]
    InvalidRate { name: &'static str, value: f64 },
    #[error("initial Bell-pair error {0} must be below 1")]
    InitialErrorTooLarge(f64),
    #[error("state support of {support} terms exceeds the cap of 2^{cap}")]
    TooManyQubits { support: usize, cap: u32 },
    #[error("circuit uses {0} qubits, more than the simulator width")]
    CircuitTooWide(usize),
    #[error("placement failed: {0}")]
    PlacementOverflow(String),
    #[error("degenerate fit input: {0}")]
    DegenerateInput(String),
    #[error("invalid data table: {0}")]
    InvalidData(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, QlutError>;
