//! Crate-wide error type.

use crate::hilbert::QubitLabel;
use thiserror::Error;

/// Errors reported by state construction, gate application, and analytics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A register was declared with the same qubit label twice.
    #[error("duplicate qubit label {0} in register")]
    DuplicateLabel(QubitLabel),
    /// An operation referenced a label absent from the state's register.
    #[error("qubit label {0} not present in register")]
    MissingLabel(QubitLabel),
    /// Two states were combined whose registers do not match.
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    /// A basis index other than 0 or 1 was supplied for a qubit.
    #[error("basis index {index} out of range for a qubit")]
    IndexOutOfRange { index: usize },
    /// An amplitude vector length disagreed with the register size.
    #[error("amplitude vector of length {got} does not fit a {qubits}-qubit register")]
    DimensionMismatch { qubits: usize, got: usize },
    /// A supplied 2x2 matrix failed the unitarity check.
    #[error("matrix is not unitary within tolerance")]
    NonUnitary,
    /// A state that must be normalized was not.
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    /// A register exceeded the supported dense-simulation size.
    #[error("register of {0} qubits exceeds the supported maximum of 14")]
    RegisterTooLarge(usize),
    /// A numeric argument left its mathematical domain.
    #[error("numeric domain error: {0}")]
    Domain(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
