use thiserror::Error;

use crate::diagnostics::{Code, Diagnostic};

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("register index {index} out of range for {n} registers")]
    RegisterOutOfRange { index: usize, n: usize },

    #[error("invalid register list: {0}")]
    InvalidRegisters(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate set is not a stage: `{0}` is missing a prerequisite")]
    NotAStage(String),

    #[error("circuit is invalid ({} diagnostics)", .0.len())]
    InvalidCircuit(Vec<Diagnostic>),

    #[error("incoherent track at gate `{gate}`: {reason}")]
    IncoherentTrack { gate: String, reason: String },

    #[error("selector of gate `{gate}` has no entry for ({key})")]
    SelectorMiss { gate: String, key: String },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid bout split: {0}")]
    InvalidSplit(String),

    #[error("linear order is not coherent with the poset: {0}")]
    IncoherentOrder(String),

    #[error("track count exceeds the cap of {cap}")]
    TooManyTracks { cap: usize },

    #[error("zero-trace state after bout {bout}")]
    ZeroTrace { bout: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("constraint violated: classically controlled measurement gates {0:?}")]
    ClassicallyControlledMeasurement(Vec<String>),

    #[error("invalid commensuration: {0}")]
    InvalidCommensuration(String),

    #[error("register mismatch: {0}")]
    RegisterMismatch(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// The error as diagnostics: validation failures keep their own codes.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            Error::InvalidCircuit(d) => d.clone(),
            Error::ClassicallyControlledMeasurement(ids) => ids
                .iter()
                .map(|id| {
                    Diagnostic::error(
                        Code::ConstraintViolation,
                        id,
                        "classically controlled measurement gates cannot be deferred",
                    )
                })
                .collect(),
            Error::Json(e) => vec![Diagnostic::error(Code::MalformedJson, "$", e.to_string())],
            Error::Parse(m) => vec![Diagnostic::error(Code::InvalidInput, "$", m.clone())],
            other => vec![Diagnostic::error(Code::OperationFailed, "$", other.to_string())],
        }
    }
}
