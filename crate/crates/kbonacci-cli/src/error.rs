//! Machine-readable CLI errors: every failure is reported on stderr as a
//! JSON object `{"error": {"kind": ..., "message": ...}}` and exits
//! nonzero, so scripted callers never have to parse prose.

use std::fmt;

use serde::Serialize;

use kbonacci::{CharacterizeError, FractalError, ProbabilityError, SpecError, WalkError};

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            message: message.into(),
        }
    }

    /// The stderr payload: `{"error": {...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: &'a CliError,
        }
        serde_json::to_string(&Wrapper { error: self }).expect("error objects serialize")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        let kind = match &e {
            SpecError::OrderTooSmall { .. } | SpecError::OrderTooLarge { .. } => "bad_order",
            SpecError::InitLengthMismatch { .. } => "bad_init",
            SpecError::ZeroInitTerm { .. } => "zero_init_term",
            SpecError::SignedSumVanishes { .. } => "start_condition_violation",
            SpecError::RangeTooShort { .. } => "bad_range",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        Self::new("bad_walk_input", e.to_string())
    }
}

impl From<CharacterizeError> for CliError {
    fn from(e: CharacterizeError) -> Self {
        Self::new("bad_window", e.to_string())
    }
}

impl From<ProbabilityError> for CliError {
    fn from(e: ProbabilityError) -> Self {
        let kind = match &e {
            ProbabilityError::PrefixTooLong { .. } => "enum_cap_exceeded",
            _ => "bad_probability_input",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<FractalError> for CliError {
    fn from(e: FractalError) -> Self {
        Self::new("bad_dimension_input", e.to_string())
    }
}
