use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants fall into three groups: invalid input ([`FockError::InvalidParams`],
/// [`FockError::LengthMismatch`], ...), numeric policy violations where a
/// discretization cannot certify the requested accuracy, and verdict failures
/// (a symbol that is not of vanishing oscillation).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported quadrature scheme: {0}")]
    UnsupportedScheme(String),

    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid measure weight {grid} does not match the required weight {required}")]
    MeasureMismatch { grid: f64, required: f64 },

    #[error("grid exactness degree {available} is below the required degree {required}")]
    ExactnessShortfall { required: usize, available: usize },

    #[error("symbol bound {bound} violated at node {node}: |f| = {value}")]
    SymbolBoundViolated { node: usize, value: f64, bound: f64 },

    #[error("truncation leakage {leakage:.3e} exceeds threshold {threshold:.3e}")]
    TruncationLeakage { leakage: f64, threshold: f64 },

    #[error("grid too coarse: refinement changed the value by {relative_change:.3e}")]
    GridTooCoarse { relative_change: f64 },

    #[error("grid extent {extent} too small: {reason}")]
    ExtentTooSmall { extent: f64, reason: String },

    #[error("center lattice spacing {spacing} exceeds the limit {limit}")]
    CentersTooSparse { spacing: f64, limit: f64 },

    #[error("empty support mask")]
    EmptySupport,

    #[error("values did not stabilize: drift {drift:.3e} exceeds tolerance {tolerance:.3e}")]
    NotStabilized { drift: f64, tolerance: f64 },

    #[error("symbol failed the vanishing-oscillation check ({0})")]
    NotVanishingOscillation(String),

    #[error("operator too large for dense representation: {0} nodes")]
    TooLarge(usize),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FockError>;
