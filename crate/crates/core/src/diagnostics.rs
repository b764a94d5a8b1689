use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Closed set of diagnostic codes. Every code is documented in the README.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    MalformedJson,
    SchemaViolation,
    UnsupportedVersion,
    NoRegisters,
    DuplicateRegisterName,
    DuplicateGateId,
    EmptyGate,
    RegisterOutOfRange,
    RepeatedRegister,
    EmptyOpSet,
    DimensionMismatch,
    NotUnitary,
    EmptyMeasurement,
    IncompleteMeasurement,
    OverlappingOutcomes,
    InvalidLabel,
    UnknownControl,
    ControlNotMeasurement,
    DuplicateControl,
    SelectorArity,
    SelectorNotTotal,
    SelectorUnknownTarget,
    SelectorUnknownKey,
    NonCcMultipleOps,
    Cycle,
    IoError,
    InvalidInput,
    ConstraintViolation,
    OperationFailed,
    NotFaithful,
}

impl Code {
    pub const ALL: [Code; 30] = [
        Code::MalformedJson,
        Code::SchemaViolation,
        Code::UnsupportedVersion,
        Code::NoRegisters,
        Code::DuplicateRegisterName,
        Code::DuplicateGateId,
        Code::EmptyGate,
        Code::RegisterOutOfRange,
        Code::RepeatedRegister,
        Code::EmptyOpSet,
        Code::DimensionMismatch,
        Code::NotUnitary,
        Code::EmptyMeasurement,
        Code::IncompleteMeasurement,
        Code::OverlappingOutcomes,
        Code::InvalidLabel,
        Code::UnknownControl,
        Code::ControlNotMeasurement,
        Code::DuplicateControl,
        Code::SelectorArity,
        Code::SelectorNotTotal,
        Code::SelectorUnknownTarget,
        Code::SelectorUnknownKey,
        Code::NonCcMultipleOps,
        Code::Cycle,
        Code::IoError,
        Code::InvalidInput,
        Code::ConstraintViolation,
        Code::OperationFailed,
        Code::NotFaithful,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::MalformedJson => "malformed-json",
            Code::SchemaViolation => "schema-violation",
            Code::UnsupportedVersion => "unsupported-version",
            Code::NoRegisters => "no-registers",
            Code::DuplicateRegisterName => "duplicate-register-name",
            Code::DuplicateGateId => "duplicate-gate-id",
            Code::EmptyGate => "empty-gate",
            Code::RegisterOutOfRange => "register-out-of-range",
            Code::RepeatedRegister => "repeated-register",
            Code::EmptyOpSet => "empty-op-set",
            Code::DimensionMismatch => "dimension-mismatch",
            Code::NotUnitary => "not-unitary",
            Code::EmptyMeasurement => "empty-measurement",
            Code::IncompleteMeasurement => "incomplete-measurement",
            Code::OverlappingOutcomes => "overlapping-outcomes",
            Code::InvalidLabel => "invalid-label",
            Code::UnknownControl => "unknown-control",
            Code::ControlNotMeasurement => "control-not-measurement",
            Code::DuplicateControl => "duplicate-control",
            Code::SelectorArity => "selector-arity",
            Code::SelectorNotTotal => "selector-not-total",
            Code::SelectorUnknownTarget => "selector-unknown-target",
            Code::SelectorUnknownKey => "selector-unknown-key",
            Code::NonCcMultipleOps => "non-cc-multiple-ops",
            Code::Cycle => "cycle",
            Code::IoError => "io-error",
            Code::InvalidInput => "invalid-input",
            Code::ConstraintViolation => "constraint-violation",
            Code::OperationFailed => "operation-failed",
            Code::NotFaithful => "not-faithful",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Code::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown diagnostic code `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    /// Gate id, or a location such as `registers` / `$` for file-level problems.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.code, self.location, self.message)
    }
}
