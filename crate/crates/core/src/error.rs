use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input value: {0}")]
    InvalidInput(f64),

    #[error("invalid membership function {shape}{params:?}: {reason}")]
    InvalidShape {
        shape: &'static str,
        params: Vec<f64>,
        reason: &'static str,
    },

    #[error("invalid universe [{lo}, {hi}]")]
    InvalidUniverse { lo: f64, hi: f64 },

    #[error("alpha out of range: {0} (expected 0 < alpha <= 1)")]
    AlphaOutOfRange(f64),

    #[error("universe mismatch: [{0}, {1}] vs [{2}, {3}]")]
    UniverseMismatch(f64, f64, f64, f64),

    #[error("invalid clip height: {0}")]
    InvalidClipHeight(f64),

    #[error("invalid resolution: {0} (need at least 2 samples)")]
    InvalidResolution(usize),

    #[error("empty aggregate, no rule fired")]
    EmptyAggregate,

    #[error("invalid variable `{name}`: {reason}")]
    InvalidVariable { name: String, reason: String },

    #[error("unknown antecedent {var}.{term}")]
    UnknownAntecedent { var: String, term: String },

    #[error("invalid rule {rule}: {reason}")]
    InvalidRule { rule: usize, reason: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown term `{term}` for variable `{var}`")]
    UnknownTerm { var: String, term: String },

    #[error("missing input for variable `{0}`")]
    MissingInput(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("duplicate test id {0}")]
    DuplicateTestId(u32),

    #[error("test {id}: {reason}")]
    InvalidTest { id: u32, reason: String },

    #[error("prerequisite cycle: {}", format_cycle(.0))]
    PrerequisiteCycle(Vec<u32>),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("fault id {0} is not in the dataset")]
    UnknownFault(u32),

    #[error("inconsistent survey: {0}")]
    InconsistentSurvey(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_cycle(ids: &[u32]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join("→")
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
