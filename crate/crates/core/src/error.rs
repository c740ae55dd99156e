use thiserror::Error;

/// Errors produced by the simulator, enumeration and training layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("two-qubit gate requires distinct qubits (got {0} twice)")]
    DuplicateQubit(usize),
    #[error("batch size mismatch: {0} tableaus vs {1} gates")]
    BatchMismatch(usize, usize),
    #[error("heterogeneous batch: expected n={n}, rows={rows}")]
    HeterogeneousBatch { n: usize, rows: usize },
    #[error("invalid Pauli character '{0}' (expected one of I, X, Y, Z)")]
    InvalidPauliChar(char),
    #[error(
        "target error set needs {needed} bytes, over the {budget}-byte budget \
         (raise `memory_budget` or reduce n/d)"
    )]
    CapacityExceeded { needed: u128, budget: u128 },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("empty action space for the requested gate set and connectivity")]
    EmptyActionSpace,
    #[error("action index {index} out of range (action space has {len})")]
    InvalidAction { index: usize, len: usize },
    #[error("gate {0} not allowed here: CSS episodes accept only CNOT actions")]
    CssViolation(String),
    #[error("Hadamard on qubit {index} would touch a logical slot (qubits 0..{k})")]
    HadamardOnLogical { index: usize, k: usize },
    #[error("mixed code parameters: {0}")]
    MixedParameters(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("training fault: {0}")]
    TrainingFault(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
