use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants split into two families: input validation problems (bad
/// arguments, malformed files) and runtime failures of the numerics
/// (degenerate data). The CLI maps them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid panel: {0}")]
    InvalidPanel(String),
    #[error("degenerate regressor")]
    DegenerateRegressor,
    #[error("singular moment matrix")]
    SingularMomentMatrix,
    #[error("degenerate residual variance")]
    DegenerateResidualVariance,
    #[error("lag exceeds sample")]
    LagExceedsSample,
    #[error("nonstationary coefficient vector")]
    NonstationaryCoefficients,
    #[error("lag rule exceeds panel width")]
    LagRuleExceedsWidth,
    #[error("no bootstrap draws")]
    NoBootstrapDraws,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty input")]
    EmptyInput,
    #[error("malformed CSV row {0}")]
    MalformedRow(usize),
    #[error("parse error at ({0},{1})")]
    ParseCell(usize, usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad user input rather than degenerate data.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::EmptySequence
                | Error::NonFinite(_)
                | Error::InvalidArgument(_)
                | Error::InvalidPanel(_)
                | Error::LagRuleExceedsWidth
                | Error::NoBootstrapDraws
                | Error::DimensionMismatch(_)
                | Error::EmptyInput
                | Error::MalformedRow(_)
                | Error::ParseCell(_, _)
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
