use thiserror::Error;

use crate::circuit::ParseError;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("a register needs at least one qubit")]
    EmptyRegister,

    #[error("cannot hold a {n_qubits}-qubit state: {reason}")]
    Capacity { n_qubits: usize, reason: String },

    #[error("wire {wire} is out of range for a {n_qubits}-qubit register")]
    WireOutOfRange { wire: usize, n_qubits: usize },

    #[error("wire {0} appears more than once")]
    DuplicateWire(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{gate} takes {expected} parameter(s), got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{gate} is not supported by {context}")]
    UnsupportedGate {
        gate: &'static str,
        context: &'static str,
    },

    #[error("cannot differentiate parameter {param} of {gate}: {reason}")]
    UnsupportedDifferentiation {
        gate: &'static str,
        param: usize,
        reason: &'static str,
    },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state diverged: {0}")]
    Diverged(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SimError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }
}

/// Checks that every wire is in range and that no wire repeats.
pub(crate) fn check_wires(wires: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= n_qubits {
            return Err(SimError::WireOutOfRange { wire: w, n_qubits });
        }
        if wires[..i].contains(&w) {
            return Err(SimError::DuplicateWire(w));
        }
    }
    Ok(())
}
