//! Positive-sentiment probabilities for bias samples.
//!
//! Scores come from precomputed JSONL files, a remote scoring service, or a
//! deterministic hash-based mock. Whatever the source, the returned key set
//! equals the requested sample-id set or the call fails.

mod mock;
mod prompt;
#[cfg(feature = "remote")]
mod remote;
mod table;

pub use mock::{mock_probability, mock_score};
pub use prompt::{build_generative_prompt, parse_generative_label, PROMPT_HEADER};
#[cfg(feature = "remote")]
pub use remote::{
    classify_remote, score_remote, score_remote_with, ClassProbs, HttpTransport, ScoreTransport,
    TransportError,
};
pub use table::{read_scores, ScoreRecord, ScoreTable};

use serde::{Deserialize, Serialize};

use crate::corpus::BiasSample;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScoringError {
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate sample id `{0}`")]
    DuplicateSampleId(String),
    #[error("sample `{sample_id}`: probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { sample_id: String, value: f64 },
    #[error("scoring service unreachable: {0}")]
    Unreachable(String),
    #[error("scoring service response violates the schema: {0}")]
    SchemaViolation(String),
    #[error("{} samples could not be scored", unscored.len())]
    PartialFailure { unscored: Vec<String> },
    #[error("no score for {} requested samples (first: {})", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    MissingScores(Vec<String>),
    #[error("invalid scorer configuration: {0}")]
    InvalidConfig(String),
    #[error("prompt text is empty")]
    EmptyText,
    #[error("completion `{0}` names no sentiment label")]
    Unparseable(String),
    #[error("cache I/O failed: {0}")]
    Cache(String),
    #[error("score file I/O failed: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ScoringError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerMode {
    File,
    Remote,
    Mock,
}

/// How to obtain scores for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorerConfig {
    pub mode: ScorerMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_id: String,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    /// Extra attempts after the first failure of a batch.
    #[serde(default = "default_retries")]
    pub retry_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_path: Option<std::path::PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Score files for file mode; merged in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub score_files: Vec<std::path::PathBuf>,
}

fn default_batch_size() -> usize {
    32
}

fn default_in_flight() -> usize {
    4
}

fn default_retries() -> u32 {
    2
}

impl ScorerConfig {
    pub fn mock(model_id: impl Into<String>, seed: u64) -> Self {
        Self {
            mode: ScorerMode::Mock,
            endpoint: None,
            model_id: model_id.into(),
            batch_size: default_batch_size(),
            max_in_flight: default_in_flight(),
            retry_count: default_retries(),
            cache_path: None,
            seed: Some(seed),
            score_files: Vec::new(),
        }
    }

    pub fn remote(model_id: impl Into<String>, endpoint: impl Into<String>) -> Self {
        Self {
            mode: ScorerMode::Remote,
            endpoint: Some(endpoint.into()),
            seed: None,
            ..Self::mock(model_id, 0)
        }
    }

    pub fn files(model_id: impl Into<String>, files: Vec<std::path::PathBuf>) -> Self {
        Self {
            mode: ScorerMode::File,
            seed: None,
            score_files: files,
            ..Self::mock(model_id, 0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(ScoringError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.max_in_flight == 0 {
            return Err(ScoringError::InvalidConfig("max_in_flight must be >= 1".into()));
        }
        match self.mode {
            ScorerMode::Remote if self.endpoint.as_deref().unwrap_or("").is_empty() => Err(
                ScoringError::InvalidConfig("remote mode requires an endpoint".into()),
            ),
            ScorerMode::Mock if self.seed.is_none() => {
                Err(ScoringError::InvalidConfig("mock mode requires a seed".into()))
            }
            ScorerMode::File if self.score_files.is_empty() => Err(ScoringError::InvalidConfig(
                "file mode requires at least one score file".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Loads and merges score files; a sample id appearing twice is an error.
pub fn load_score_files(paths: &[std::path::PathBuf]) -> Result<ScoreTable> {
    let mut table = ScoreTable::default();
    for path in paths {
        let bytes = std::fs::read(path)
            .map_err(|e| ScoringError::Io(format!("{}: {e}", path.display())))?;
        table.merge(read_scores(&bytes)?)?;
    }
    Ok(table)
}

/// Scores `samples` with whichever backend `config` selects. The result
/// holds exactly the requested ids.
pub fn score_samples(samples: &[BiasSample], config: &ScorerConfig) -> Result<ScoreTable> {
    config.validate()?;
    match config.mode {
        ScorerMode::Mock => Ok(mock_score(samples, config.seed.unwrap_or_default())),
        ScorerMode::File => load_score_files(&config.score_files)?.restrict(samples),
        #[cfg(feature = "remote")]
        ScorerMode::Remote => score_remote(samples, config),
        #[cfg(not(feature = "remote"))]
        ScorerMode::Remote => Err(ScoringError::InvalidConfig(
            "built without the `remote` feature".into(),
        )),
    }
}
