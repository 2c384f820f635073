use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("stream length must be at least 1")]
    ZeroLength,

    #[error("scaling factor must be positive, got {0}")]
    NonPositiveScale(String),

    #[error("value must be finite")]
    NonFinite,

    #[error("bit pattern is not a thermometer code: {0}")]
    NotThermometer(String),

    #[error("operand length {0} must be even and at least 2")]
    OddLength(usize),

    #[error("bitonic sorting needs an even total width, got {0}")]
    OddTotal(usize),

    #[error("addition needs at least two operands")]
    TooFewOperands,

    #[error("scaling factors differ: {0} vs {1}; align them first")]
    ScaleMismatch(String, String),

    #[error("rate must be at least 1")]
    ZeroRate,

    #[error("rate {rate} does not divide stream length {len}")]
    RateNotDividing { rate: usize, len: usize },

    #[error("window of {kept} bits cannot be centered in {len} bits")]
    UncenteredWindow { kept: usize, len: usize },

    #[error("output length {b_out} exceeds input length {b_in}")]
    OutputWiderThanInput { b_in: usize, b_out: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unrealizable at {stage}: {source}")]
    Unrealizable {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at(stage: impl Into<String>) -> impl FnOnce(Error) -> Error {
        let stage = stage.into();
        move |source| match source {
            e @ Error::Unrealizable { .. } => e,
            source => Error::Unrealizable {
                stage,
                source: Box::new(source),
            },
        }
    }

    /// True when the error comes from width or scale bookkeeping rather than bad input.
    pub fn is_unrealizable(&self) -> bool {
        matches!(
            self,
            Error::Unrealizable { .. }
                | Error::RateNotDividing { .. }
                | Error::UncenteredWindow { .. }
                | Error::OddLength(_)
                | Error::OddTotal(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
