//! Three-phase comparison protocol: task-accuracy parity across languages,
//! per-cell bias metrics with significance tests, and monolingual versus
//! multilingual deltas. Reports serialize to JSON and to table-shaped CSV.

mod accuracy;
mod config;
mod emit;
mod phase1;
mod phase2;
mod phase3;
mod pipeline;

pub use accuracy::{compute_accuracy, read_predictions, AccuracyMode, PredictionRecord};
pub use config::{
    load_config, parse_config, resolve_output_dir, ComparisonKind, ComparisonSpec,
    ExperimentConfig, OUTPUT_ENV,
};
pub use emit::{emit_report, load_report, report_json, EmitFormat, Report};
pub use phase1::{run_phase1, AccuracyRow, PairwiseTest, Phase1Report};
pub use phase2::{
    model_family, run_phase2, run_phase2_with, CellReport, GenderGap, Phase2Options, Phase2Report,
    SkippedCell, VPoint,
};
pub use phase3::{
    compare_reports, run_phase3, AmplificationSummary, DeltaRecord, Phase3Report, ShiftRecord,
    SkippedComparison,
};
pub use pipeline::{expand_from_config, load_corpus, load_predictions, score_models};

use std::path::PathBuf;

use crate::corpus::CorpusError;
use crate::metrics::MetricError;
use crate::scoring::ScoringError;
use crate::stats::StatsError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("malformed config: {0}")]
    MalformedConfig(String),
    #[error("missing path: {}", .0.display())]
    MissingPath(PathBuf),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no non-neutral gold labels left for two-way accuracy")]
    EmptyAfterFilter,
    #[error("prediction files are not aligned: {0}")]
    UnalignedTestSets(String),
    #[error("malformed prediction line {line}: {message}")]
    MalformedPrediction { line: usize, message: String },
    #[error("mono and multi reports cover different cells: {0}")]
    MismatchedCells(String),
    #[error("unknown model or family `{0}`")]
    UnknownModel(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error("i/o failure on {path}: {message}")]
    IoFailure { path: String, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

pub(crate) fn io_failure(path: &std::path::Path, err: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::IoFailure {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}
