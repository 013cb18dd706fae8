use thiserror::Error;

/// Errors produced by channel parsing, metric evaluation, region computation
/// and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed channel document: {0}")]
    Malformed(String),

    #[error("non-stochastic row {row}: entries sum to {sum}")]
    NonStochastic { row: String, sum: f64 },

    #[error("negative entry {value} in row {row}")]
    NegativeEntry { row: String, value: f64 },

    #[error("inconsistent alphabet sizes: {0}")]
    AlphabetSize(String),

    #[error("alphabet mismatch: {left} vs {right} symbols")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("support violation at symbol {symbol}: {what}")]
    Support { symbol: usize, what: &'static str },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A chi-squared distance of zero leaves the throughput or weight
    /// unconstrained along this direction.
    #[error("unbounded direction: chi-squared distance is zero ({0})")]
    UnboundedDirection(String),

    #[error("too few usable points for regression: {usable} of {total}")]
    TooFewPoints { usable: usize, total: usize },

    #[error("budget path optimizer did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("size cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("induced distribution emits an alarm symbol absent under the innocent output")]
    AlarmEmitted,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
