//! Run configuration: optional config file merged under command-line flags.
//!
//! Precedence is strict: explicit flags beat config-file values, which beat
//! built-in defaults. The file is a single JSON object whose keys mirror the
//! flag names; unknown keys are rejected so typos fail loudly.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::CliError;

/// Config-file schema. Every field is optional; a command only consults the
/// fields it understands.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    /// One of `powers`, `tribonacci3`, `custom`.
    pub init_mode: Option<String>,
    /// Initial terms, required when `init_mode` is `custom`.
    pub init: Option<Vec<i64>>,
    /// `zero`, `f1`, `neg-f1`, or a decimal integer string.
    pub target: Option<String>,
    /// Table length for `sequence`.
    pub n: Option<usize>,
    /// Sign word for `walk`.
    pub signs: Option<String>,
    pub prefix_len: Option<usize>,
    pub i_max: Option<usize>,
    pub horizon: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub m_max: Option<usize>,
    pub ratios: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    /// One of `json`, `csv`, `table`.
    pub output_format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::new("config_io", format!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::new("config_parse", format!("invalid config {}: {e}", path.display()))
        })
    }
}

/// How the initial terms are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Powers,
    Tribonacci3,
    Custom,
}

impl InitMode {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "powers" => Ok(Self::Powers),
            "tribonacci3" => Ok(Self::Tribonacci3),
            "custom" => Ok(Self::Custom),
            other => Err(CliError::new(
                "config_parse",
                format!("unknown init_mode {other:?} (expected powers, tribonacci3, or custom)"),
            )),
        }
    }
}

/// Walk/probability target resolved from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Zero,
    F1,
    NegF1,
    Custom(BigInt),
}

impl Target {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "zero" | "0" => Ok(Self::Zero),
            "f1" => Ok(Self::F1),
            "neg-f1" | "neg_f1" | "-f1" => Ok(Self::NegF1),
            other => other
                .parse::<BigInt>()
                .map(Self::Custom)
                .map_err(|_| {
                    CliError::new(
                        "bad_target",
                        format!("target must be zero, f1, neg-f1, or a decimal integer, got {other:?}"),
                    )
                }),
        }
    }

    /// The value the walk is compared against, given the spec's first term.
    pub fn value(&self, f1: i64) -> BigInt {
        match self {
            Self::Zero => BigInt::from(0),
            Self::F1 => BigInt::from(f1),
            Self::NegF1 => BigInt::from(-f1),
            Self::Custom(v) => v.clone(),
        }
    }
}

impl fmt::Display for Target {
    /// The serialized spelling: `0`, `f1`, `-f1`, or the decimal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "0"),
            Self::F1 => write!(f, "f1"),
            Self::NegF1 => write!(f, "-f1"),
            Self::Custom(v) => write!(f, "{v}"),
        }
    }
}

/// Output rendering selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "table" => Ok(Self::Table),
            other => Err(CliError::new(
                "config_parse",
                format!("unknown output_format {other:?} (expected json, csv, or table)"),
            )),
        }
    }
}
