use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("parameter outside family domain: {0}")]
    Domain(String),

    #[error("kendall's tau {tau} is not attainable: {reason}")]
    TauOutOfRange { tau: f64, reason: String },

    #[error("length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("candidate graph is disconnected")]
    DisconnectedGraph,

    #[error("invalid vine structure: {0}")]
    Structure(String),

    #[error("edge at tree {level} requires ancestors that have not been fitted")]
    MissingAncestor { level: usize },

    #[error("model has no marginal distributions (pseudo-observation mode)")]
    MarginsAbsent,

    #[error("unknown variable: {0}")]
    UnknownVariable(String),

    #[error("unsupported model document version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("malformed model document: {0}")]
    MalformedDocument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
