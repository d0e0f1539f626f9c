use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FractelError {
    #[error("degenerate interval [{lo}, {hi}]: lower bound must be strictly below upper bound")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("affine map slope must be nonzero")]
    ZeroSlope,

    #[error("verification grid must have at least 2 points (got {grid})")]
    InvalidGrid { grid: usize },

    #[error("map sends {x} to {image}, outside [{lo}, {hi}]")]
    DomainEscape { x: f64, image: f64, lo: f64, hi: f64 },

    #[error("non-finite value encountered at x = {x}")]
    NonFinite { x: f64 },

    #[error("maps differ: (sigma, tau) = ({sigma_a}, {tau_a}) vs ({sigma_b}, {tau_b})")]
    MapMismatch {
        sigma_a: f64,
        tau_a: f64,
        sigma_b: f64,
        tau_b: f64,
    },

    #[error("scaling factor must be nonzero")]
    ZeroScalar,

    #[error("witness function vanishes at x = {x} (|value| < {threshold:e})")]
    ZeroWitness { x: f64, threshold: f64 },

    #[error("claimed fractel fails for its witness: max residual {max_residual:e} > {tol:e}")]
    WitnessMismatch { max_residual: f64, tol: f64 },

    #[error("map is not contractive (|sigma| = {sigma})")]
    NotContractive { sigma: f64 },

    #[error("piece images do not cover the base interval (gap near x = {gap_at})")]
    NotCovering { gap_at: f64 },

    #[error("contraction factor {s} must lie strictly below 1")]
    ContractionViolation { s: f64 },

    #[error("domains [{lo_a}, {hi_a}] and [{lo_b}, {hi_b}] do not overlap in an interval")]
    EmptyOverlap {
        lo_a: f64,
        hi_a: f64,
        lo_b: f64,
        hi_b: f64,
    },

    #[error("basis-change matrix is singular")]
    SingularT,

    #[error("I - M is singular: M has eigenvalue 1")]
    EigOne,

    #[error("matrix dimensions mismatch: {rows_a}x{cols_a} vs {rows_b}x{cols_b}")]
    DimensionMismatch {
        rows_a: usize,
        cols_a: usize,
        rows_b: usize,
        cols_b: usize,
    },

    #[error("digit {digit} invalid for base {base}")]
    BadDigit { digit: u32, base: u32 },

    #[error("invalid rational literal `{text}`")]
    BadRational { text: String },

    #[error("map does not leave [0, 1] invariant (image [{lo}, {hi}])")]
    NotInS { lo: f64, hi: f64 },

    #[error("unknown fixture `{name}`")]
    UnknownFixture { name: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("local IFS has no serializable description")]
    NotSerializable,
}

pub type Result<T> = std::result::Result<T, FractelError>;
