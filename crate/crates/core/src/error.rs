use thiserror::Error;

/// Errors raised across the crate.
///
/// Validation failures carry the name of the invariant that did not hold so
/// the CLI can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invariant `{invariant}` violated: {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension budget exceeded: {dimension} needs {required} > limit {limit}")]
    BudgetExceeded {
        dimension: String,
        required: usize,
        limit: usize,
    },

    #[error("parse error{}: {field}: {message}", .line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            detail: detail.into(),
        }
    }

    /// Short machine-friendly name of the failed invariant or error class.
    pub fn invariant_name(&self) -> String {
        match self {
            Error::Validation { invariant, .. } => (*invariant).to_string(),
            Error::DimensionMismatch { .. } => "dimension_match".to_string(),
            Error::BudgetExceeded { .. } => "dimension_budget".to_string(),
            Error::Parse { field, .. } => format!("parse:{field}"),
            Error::UnknownScenario(_) => "known_scenario".to_string(),
            Error::Io(_) => "io".to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
