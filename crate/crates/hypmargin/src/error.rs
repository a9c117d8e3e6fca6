use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector has non-finite entries")]
    NonFinite,

    #[error("point is off the hyperboloid (x*x - 1 = {residual:e})")]
    OffManifold { residual: f64 },

    #[error("point lies on the lower sheet (x0 = {x0})")]
    LowerSheet { x0: f64 },

    #[error("Minkowski product {product} is below 1; inputs are not on the hyperboloid")]
    BelowUnitProduct { product: f64 },

    #[error("vector is not a valid classifier (w*w = {norm_sq} must be negative)")]
    InvalidHypothesis { norm_sq: f64 },

    #[error("point is outside the model domain: {0}")]
    OutsideModel(String),

    #[error("separator is not normalised (sqrt(-w*w) = {norm})")]
    Unnormalized { norm: f64 },

    #[error("empty dataset")]
    EmptySet,

    #[error("update at sample {index} would leave the classifier non-time-like")]
    DegenerateUpdate { index: usize },

    #[error("rejection sampling gave up after {attempts} attempts")]
    RejectionBudget { attempts: usize },

    #[error("sphere packing stalled with {found} vectors")]
    PackingStalled { found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
