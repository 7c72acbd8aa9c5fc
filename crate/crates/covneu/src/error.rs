use thiserror::Error;

/// Errors surfaced by the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("rows are not orthonormal (max deviation {deviation:.3e})")]
    RowsNotOrthonormal { deviation: f64 },

    #[error("group closure exceeded the bound of {max_order} elements")]
    OrderExceeded { max_order: usize },

    #[error("generator {index} is not unitary (deviation {deviation:.3e})")]
    NonUnitaryGenerator { index: usize, deviation: f64 },

    #[error("factor-system phases did not close within {bound} elements")]
    InfinitePhaseGroup { bound: usize },

    #[error("orbit outer products do not sum to a multiple of identity (deviation {deviation:.3e}); the action is reducible")]
    NotCompletable { deviation: f64 },

    #[error("representation does not permute the POVM operators (element {element}, operator {operator})")]
    NotCovariant { element: usize, operator: usize },

    #[error("state is not a valid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("decomposition failed after {retries} reseeds: {reason}")]
    DecompositionFailed { retries: usize, reason: String },

    #[error("character multiplicity {value:.4} is not close to an integer")]
    CharacterMismatch { value: f64 },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("representation is not a constituent: irreducible component {label} occurs {left} times on the left but {right} times on the right")]
    NotAConstituent {
        label: usize,
        left: usize,
        right: usize,
    },

    #[error("matrix is not in the intertwining space (deviation {deviation:.3e})")]
    NotInIntertwiningSpace { deviation: f64 },

    #[error("intertwiner violates the block structure (deviation {deviation:.3e})")]
    StructureViolation { deviation: f64 },

    #[error("theorem hypothesis violated: {reason}")]
    HypothesisViolated { reason: String },

    #[error("wire {wire} out of range for {qubits} qubits")]
    WireOutOfRange { wire: usize, qubits: usize },

    #[error("vector is not normalized as required: {reason}")]
    NotNormalized { reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
