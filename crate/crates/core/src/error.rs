use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{n} qubits exceeds the dense limit of {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("qubit count {0} out of range")]
    QubitRange(usize),

    #[error("qubit index {index} outside 1..={n}")]
    QubitIndex { index: usize, n: usize },

    #[error("identity Pauli string not allowed here")]
    IdentityPauli,

    #[error("rotation axis acts on its own control qubit {0}")]
    AxisTouchesControl(usize),

    #[error("operator is not unitary (Frobenius deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle is not deterministic on |0...0>: {0}")]
    NotDeterministic(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
