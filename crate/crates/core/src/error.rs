use thiserror::Error;

/// Errors raised by the statistics, resampling and pipeline layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("labels and values differ in length ({labels} vs {values})")]
    LengthMismatch { labels: usize, values: usize },

    #[error("sample is empty")]
    EmptySample,

    #[error("label at position {index} is {value}, expected 0 or 1")]
    InvalidLabel { index: usize, value: u8 },

    #[error("value at position {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("degenerate grouping: n0={n0}, n1={n1} (both groups must be nonempty)")]
    DegenerateGroup { n0: usize, n1: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("xi={xi} is not attainable for n0={n0}, n1={n1}")]
    UnattainableXi { xi: f64, n0: usize, n1: usize },

    #[error("enumeration of {states} states exceeds the budget of {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("feature sets differ between folds")]
    InconsistentFeatures,

    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("feature '{feature}': {source}")]
    Feature {
        feature: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::EmptySample => "empty_sample",
            Error::InvalidLabel { .. } => "invalid_label",
            Error::NonFiniteValue { .. } => "non_finite",
            Error::DegenerateGroup { .. } => "degenerate_group",
            Error::Domain(_) => "domain",
            Error::UnattainableXi { .. } => "unattainable_xi",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::InconsistentFeatures => "inconsistent_features",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Feature { source, .. } => source.kind(),
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
