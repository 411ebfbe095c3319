//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by validation, numerics, and I/O across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A probability entry left [0, 1].
    #[error("probability entry {index} is {value}, outside [0, 1]")]
    ProbabilityRange { index: usize, value: f64 },

    /// A behavior's outcome distribution for one setting pair does not sum to 1.
    #[error("behavior not normalized at settings (a={setting_a}, b={setting_b}): sum = {sum}")]
    Normalization {
        setting_a: u8,
        setting_b: u8,
        sum: f64,
    },

    /// A correlation entry left [-1, 1].
    #[error("correlation E(a={setting_a}, b={setting_b}) = {value} exceeds magnitude 1")]
    CorrelationRange {
        setting_a: u8,
        setting_b: u8,
        value: f64,
    },

    /// Role labels must assign distinct settings in {0, 1} to each side's roles.
    #[error("invalid role labels: {0}")]
    InvalidLabels(String),

    /// Two behaviors with different role labelings cannot be combined.
    #[error("role labels differ between operands")]
    LabelMismatch,

    /// A scalar parameter left its admissible range.
    #[error("{name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A CHSH value beyond the algebraic maximum of 4 (or negative) signals an
    /// upstream bug.
    #[error("impossible CHSH value {0}: the combination is confined to [0, 4]")]
    ImpossibleValue(f64),

    /// Hidden-variable weights must be a probability density.
    #[error("hidden-variable weights sum to {sum}, not 1")]
    WeightSum { sum: f64 },

    /// Response tables and strategies only admit +1 / -1 entries.
    #[error("value {0} is not a valid sign; expected +1 or -1")]
    InvalidSign(i8),

    /// Model structure is inconsistent (lengths, emptiness).
    #[error("malformed model: {0}")]
    MalformedModel(String),

    /// A Bloch vector must have unit Euclidean length.
    #[error("Bloch vector has norm {norm}, expected 1")]
    NonUnitVector { norm: f64 },

    /// A state vector must have unit norm.
    #[error("state vector has norm {norm}, expected 1")]
    NonUnitState { norm: f64 },

    /// An operator expected to be Hermitian is not.
    #[error("matrix is not Hermitian: asymmetry {0}")]
    NonHermitian(f64),

    /// A dichotomic observable must square to the identity.
    #[error("operator does not square to the identity: residual {0}")]
    NotInvolutory(f64),

    /// The Jacobi eigensolver failed to drive the off-diagonal mass below
    /// threshold within its sweep cap. Not expected for finite Hermitian input.
    #[error("eigensolver did not converge: off-diagonal mass {0} after final sweep")]
    EigenNoConvergence(f64),

    /// Setting optimization hit the iteration cap before the simplex collapsed;
    /// carries the best value found so far.
    #[error("optimizer did not converge within the iteration cap; best value {best_value}")]
    OptimizerNoConvergence { best_value: f64 },

    /// Bit-string arguments of a protocol run must have matching lengths.
    #[error("input length mismatch: |x| = {x_len}, |y| = {y_len}, ensemble n = {n}")]
    LengthMismatch { x_len: usize, y_len: usize, n: usize },

    /// A matrix had an unexpected dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Configuration (CLI flags or config file) is invalid.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
