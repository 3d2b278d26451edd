use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    InvalidPrime(u32),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: i32, right: i32 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entry ({row}, {col}) has degree {found}, expected {expected}")]
    NotHomogeneous {
        row: usize,
        col: usize,
        expected: i32,
        found: i32,
    },
    #[error("rings differ")]
    RingMismatch,
    #[error("cubic rejected: {0}")]
    BadCubic(String),
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("point {0} does not lie on the surface")]
    PointOffSurface(usize),
    #[error("module is not maximal Cohen-Macaulay: {0}")]
    NotMcm(String),
    #[error("hilbert polynomial fit failed: {0}")]
    FitFailed(String),
    #[error("degree window too small: generators still appear in degree {0}")]
    WindowTooSmall(i32),
    #[error("extension class is not a cocycle")]
    NotCocycle,
    #[error("hyperplane is degenerate: {0}")]
    DegenerateHyperplane(String),
    #[error("budget exhausted after {attempts} attempts: {what}")]
    BudgetExhausted { what: String, attempts: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
