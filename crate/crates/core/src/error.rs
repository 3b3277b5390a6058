use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::Split;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate triple {triple}{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DuplicateTriple { line: Option<usize>, triple: String },

    #[error("unknown {kind} label `{label}` (vocabulary is sealed)")]
    UnknownLabel { kind: &'static str, label: String },

    #[error("duplicate {kind} label `{label}`")]
    DuplicateLabel { kind: &'static str, label: String },

    #[error("{kind} id {id} out of range (vocabulary has {len})")]
    IdOutOfRange { kind: &'static str, id: usize, len: usize },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("generation failed for {split} graph #{index} after {attempts} attempts")]
    Generation { split: Split, index: usize, attempts: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("missing data at {}: {hint}", path.display())]
    MissingData { path: PathBuf, hint: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
