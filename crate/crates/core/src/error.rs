use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelet order {0} not bundled (supported: 1..=4)")]
    OrderNotBundled(usize),

    #[error("invalid scales: {0}")]
    InvalidScale(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("layout mismatch: {0}")]
    Layout(String),

    #[error("filter table for order {order} failed validation: {reason}")]
    FilterValidation { order: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density condition violated: delta = {delta:.6} at {location}")]
    DensityViolation { delta: f64, location: String },

    #[error("sampling scheme target unreachable: {0}")]
    Unreachable(String),

    #[error("linear system is numerically singular: {0}")]
    Singular(String),

    #[error("operator variant mismatch: {0}")]
    Variant(String),

    #[error("size guard exceeded: {rows}x{cols} entries")]
    SizeGuard { rows: usize, cols: usize },

    #[error("search bounds exhausted: {0}")]
    SearchExhausted(String),

    #[error("quadrature budget exceeded: {0}")]
    Quadrature(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
