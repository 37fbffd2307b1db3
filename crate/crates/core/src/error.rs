use thiserror::Error;

/// Errors raised by the package, the circuit front end and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A real value handed to the lookup table lies outside `[-1-ε, 1+ε]`.
    #[error("contract violation: value {value} outside the lookup-table range (limit {limit})")]
    OutOfRange { value: f64, limit: f64 },

    #[error("contract violation: non-finite value ({re}, {im})")]
    NonFinite { re: f64, im: f64 },

    #[error("contract violation: complex cache exhausted ({capacity} complex values)")]
    CacheExhausted { capacity: usize },

    #[error("division by near-zero complex value ({re}, {im})")]
    DivisionByZero { re: f64, im: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("oracle refuses {qubits} qubits (limit {limit})")]
    OracleCap { qubits: usize, limit: usize },

    #[error("deadline exceeded after {completed} of {total} gates")]
    Deadline { completed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
