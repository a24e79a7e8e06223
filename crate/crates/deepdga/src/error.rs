//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("nothing remains after normalizing {0:?}")]
    EmptyAfterNormalize(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("fractions must be nonnegative and sum to 1: {0:?}")]
    BadFractions(Vec<f64>),
    #[error("inconsistent profile: {0}")]
    Profile(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error("autoencoder has not been pretrained")]
    NotPretrained,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("both classes must be present")]
    OneClass,
    #[error("too few samples: {0}")]
    TooFew(String),
    #[error("not a probability distribution: {0}")]
    BadDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable one-word category used by the CLI for machine-parseable
    /// failure lines and exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Divergence(_) => "divergence",
            Error::Shape(_) => "shape",
            _ => "data",
        }
    }
}
