use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Category of a rejected pattern document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecErrorKind {
    Syntax,
    Schema,
    Invariant,
    NestingDepthExceeded,
}

/// A rejected pattern document. `path` is a JSON pointer to the offending value
/// (empty string for the document root).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecError {
    pub kind: SpecErrorKind,
    pub path: String,
    pub message: String,
}

impl SpecError {
    pub fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError {
            kind: SpecErrorKind::Invariant,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError {
            kind: SpecErrorKind::Schema,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("degenerate transform: |det| = {det:e}")]
    DegenerateTransform { det: f64 },
    #[error("axes `{axes}` not usable on a {dimensionality}D lattice")]
    AxisMismatch {
        axes: &'static str,
        dimensionality: u8,
    },
    #[error("data projection is not invertible: |det| = {det:e}")]
    ProjectionDegenerate { det: f64 },
    #[error("nesting depth exceeded: depth {depth} > max {max}")]
    NestingDepthExceeded { depth: usize, max: usize },
    #[error("halo {halo} must be smaller than the host's minimum half-extent {limit}")]
    HaloTooLarge { halo: f64, limit: f64 },
    #[error("invalid host symbol: {0}")]
    InvalidHost(String),
    #[error("lattice would need {count} points (limit {limit})")]
    LatticeTooLarge { count: u128, limit: u128 },
    #[error("data records: {0}")]
    Records(String),
}

pub type Result<T, E = PatternError> = std::result::Result<T, E>;
