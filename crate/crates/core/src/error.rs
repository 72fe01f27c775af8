//! Crate-wide error type.

use thiserror::Error;

/// Which of the two label mass totals vanished in a degenerate input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMass {
    /// The expected-positive total `n+` is zero.
    Positive,
    /// The expected-negative total `n-` is zero.
    Negative,
}

impl std::fmt::Display for LabelMass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelMass::Positive => write!(f, "expected-positive total n+"),
            LabelMass::Negative => write!(f, "expected-negative total n-"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rating scale: min {min} must be strictly below max {max} and both finite")]
    InvalidScale { min: f64, max: f64 },

    #[error("rating {rating} out of scale bounds [{min}, {max}]{}", item_suffix(.item_id))]
    RatingOutOfRange {
        item_id: String,
        rating: f64,
        min: f64,
        max: f64,
    },

    #[error("rating is not a finite number{}", item_suffix(.item_id))]
    NonFiniteRating { item_id: String },

    #[error("empty annotation list{}", item_suffix(.item_id))]
    EmptyAnnotations { item_id: String },

    #[error("invalid vote {value}: majority voting requires binary votes in {{0, 1}}{}", item_suffix(.item_id))]
    InvalidVote { item_id: String, value: f64 },

    #[error("exactly split vote{}; tie policy is set to error", item_suffix(.item_id))]
    TiedVote { item_id: String },

    #[error("annotator id list length {annotators} does not match rating count {ratings}{}", item_suffix(.item_id))]
    MismatchedAnnotators {
        item_id: String,
        ratings: usize,
        annotators: usize,
    },

    #[error("duplicate item id `{item_id}`")]
    DuplicateItemId { item_id: String },

    #[error("invalid probability {value}: must lie in [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("invalid threshold {threshold}: must lie in [0, 1]")]
    InvalidThreshold { threshold: f64 },

    #[error("score for item `{item_id}` is not finite")]
    NonFiniteScore { item_id: String },

    #[error("degenerate labels: {missing} is zero")]
    DegenerateLabels { missing: LabelMass },

    #[error("need at least 2 models, found {found}")]
    TooFewModels { found: usize },

    #[error("duplicate model id `{model_id}`")]
    DuplicateModelId { model_id: String },

    #[error("model `{model_id}` item ids do not match the annotations: {description}")]
    ItemIdMismatch {
        model_id: String,
        description: String,
    },

    #[error("{path}:{line}: {message}")]
    CsvSchema {
        path: String,
        line: u64,
        message: String,
    },

    #[error("bootstrap requires iterations >= 1")]
    ZeroIterations,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to read `{path}`: {source}")]
    ReadInput {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write `{path}`: {source}")]
    WriteOutput {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse report JSON: {0}")]
    ReportParse(#[from] serde_json::Error),
}

impl Error {
    /// Attach an item id to errors raised by per-value operations that have
    /// no item context of their own.
    pub fn for_item(mut self, id: &str) -> Self {
        match &mut self {
            Error::RatingOutOfRange { item_id, .. }
            | Error::NonFiniteRating { item_id }
            | Error::EmptyAnnotations { item_id }
            | Error::InvalidVote { item_id, .. }
            | Error::TiedVote { item_id }
            | Error::MismatchedAnnotators { item_id, .. } => {
                if item_id.is_empty() {
                    *item_id = id.to_string();
                }
            }
            _ => {}
        }
        self
    }
}

fn item_suffix(item_id: &str) -> String {
    if item_id.is_empty() {
        String::new()
    } else {
        format!(" for item `{item_id}`")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
