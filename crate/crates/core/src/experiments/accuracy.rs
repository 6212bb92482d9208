use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result};
use crate::domain::SentimentLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMode {
    /// Exact-match rate over all samples.
    ThreeWay,
    /// Exact-match rate over non-neutral gold; a neutral prediction is wrong.
    TwoWay,
}

/// One line of a per-language prediction file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub language: String,
    pub pred_label: SentimentLabel,
    pub gold_label: SentimentLabel,
}

/// Parses prediction JSONL. Line numbers in errors are 1-based; blank lines
/// are skipped.
pub fn read_predictions(bytes: &[u8]) -> Result<Vec<PredictionRecord>> {
    let text = std::str::from_utf8(bytes).map_err(|e| ExperimentError::MalformedPrediction {
        line: 0,
        message: e.to_string(),
    })?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: PredictionRecord =
            serde_json::from_str(line).map_err(|e| ExperimentError::MalformedPrediction {
                line: i + 1,
                message: e.to_string(),
            })?;
        if !seen.insert(record.sample_id.clone()) {
            return Err(ExperimentError::MalformedPrediction {
                line: i + 1,
                message: format!("duplicate sample_id `{}`", record.sample_id),
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn compute_accuracy(
    predictions: &[SentimentLabel],
    gold: &[SentimentLabel],
    mode: AccuracyMode,
) -> Result<f64> {
    if predictions.len() != gold.len() {
        return Err(ExperimentError::LengthMismatch {
            left: predictions.len(),
            right: gold.len(),
        });
    }
    let considered: Vec<(&SentimentLabel, &SentimentLabel)> = predictions
        .iter()
        .zip(gold)
        .filter(|(_, g)| mode == AccuracyMode::ThreeWay || **g != SentimentLabel::Neutral)
        .collect();
    if considered.is_empty() {
        return Err(ExperimentError::EmptyAfterFilter);
    }
    let correct = considered.iter().filter(|(p, g)| p == g).count();
    Ok(correct as f64 / considered.len() as f64)
}
