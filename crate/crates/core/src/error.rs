use thiserror::Error;

/// Errors raised by the geometry toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("constant {name} must be >= 1, got {value}")]
    InvalidConstant { name: &'static str, value: String },

    #[error("unknown threshold `{name}`; valid names: {valid}")]
    UnknownThreshold { name: String, valid: String },

    #[error("malformed point `{input}` at byte {offset}: {message}")]
    MalformedPoint {
        input: String,
        offset: usize,
        message: String,
    },

    #[error("digit {digit} out of range for p = {p}")]
    DigitOutOfRange { digit: u32, p: u32 },

    #[error("tree branching p = {0} must be >= 2")]
    InvalidBranching(u32),

    #[error("height {0} is not an integer; tree points live at integer heights")]
    NonIntegralHeight(f64),

    #[error("orientation error: h(x) = {h_x} > h(y) = {h_y}; swap the arguments")]
    Orientation { h_x: f64, h_y: f64 },

    #[error("height {0} out of range: |z| > 700 overflows double precision")]
    Overflow(f64),

    #[error("height-sum violation: h_p = {left}, h_q = {right}, sum = {sum}")]
    HeightSum { left: f64, right: f64, sum: f64 },

    #[error("{what} exceeds budget of {limit}")]
    Budget { what: &'static str, limit: usize },

    #[error("point {0} is outside the generated ball or violates the margin rule")]
    OutsideBall(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {}", .0.join("; "))]
    Hypothesis(Vec<String>),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("norm arguments must be nonnegative, got ({0}, {1})")]
    NegativeNormInput(f64, f64),

    #[error("path too short: {len} steps, need at least {min}")]
    TooShort { len: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, GeomError>;
