use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Result, ScoringError};
use crate::corpus::BiasSample;
use crate::domain::SentimentLabel;

/// Model output for one sample. `p_positive` is the probability of the
/// positive class: 1 positive, 0.5 neutral, 0 negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRecord {
    pub sample_id: String,
    pub p_positive: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_label: Option<SentimentLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
}

impl ScoreRecord {
    pub fn new(sample_id: impl Into<String>, p_positive: f64) -> Self {
        Self {
            sample_id: sample_id.into(),
            p_positive,
            pred_label: None,
            model_id: None,
        }
    }

    fn check(&self) -> Result<()> {
        if self.sample_id.is_empty() {
            return Err(ScoringError::SchemaViolation("empty sample_id".into()));
        }
        if !(0.0..=1.0).contains(&self.p_positive) {
            return Err(ScoringError::ProbabilityOutOfRange {
                sample_id: self.sample_id.clone(),
                value: self.p_positive,
            });
        }
        Ok(())
    }
}

/// Scores keyed by sample id. Lookups of absent ids return `None`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    records: BTreeMap<String, ScoreRecord>,
}

impl ScoreTable {
    pub fn insert(&mut self, record: ScoreRecord) -> Result<()> {
        record.check()?;
        if self.records.contains_key(&record.sample_id) {
            return Err(ScoringError::DuplicateSampleId(record.sample_id));
        }
        self.records.insert(record.sample_id.clone(), record);
        Ok(())
    }

    pub fn from_records(records: impl IntoIterator<Item = ScoreRecord>) -> Result<Self> {
        let mut t = Self::default();
        for r in records {
            t.insert(r)?;
        }
        Ok(t)
    }

    pub fn merge(&mut self, other: ScoreTable) -> Result<()> {
        for r in other.records.into_values() {
            self.insert(r)?;
        }
        Ok(())
    }

    pub fn get(&self, sample_id: &str) -> Option<&ScoreRecord> {
        self.records.get(sample_id)
    }

    pub fn p_positive(&self, sample_id: &str) -> Option<f64> {
        self.records.get(sample_id).map(|r| r.p_positive)
    }

    pub fn contains(&self, sample_id: &str) -> bool {
        self.records.contains_key(sample_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in sample-id order.
    pub fn records(&self) -> impl Iterator<Item = &ScoreRecord> {
        self.records.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    /// Keeps only the scores of `samples`; fails listing every requested id
    /// that has no score.
    pub fn restrict(&self, samples: &[BiasSample]) -> Result<ScoreTable> {
        let mut out = ScoreTable::default();
        let mut missing = Vec::new();
        for s in samples {
            match self.records.get(&s.sample_id) {
                Some(r) => {
                    out.records.insert(r.sample_id.clone(), r.clone());
                }
                None => missing.push(s.sample_id.clone()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            missing.sort();
            Err(ScoringError::MissingScores(missing))
        }
    }

    /// One JSON object per line, sorted by sample id.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.records.values() {
            out.push_str(&serde_json::to_string(r).expect("score record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses a JSONL score file. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn read_scores(bytes: &[u8]) -> Result<ScoreTable> {
    let text = std::str::from_utf8(bytes).map_err(|e| ScoringError::MalformedLine {
        line: 0,
        message: e.to_string(),
    })?;
    let mut table = ScoreTable::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ScoreRecord =
            serde_json::from_str(line).map_err(|e| ScoringError::MalformedLine {
                line: i + 1,
                message: e.to_string(),
            })?;
        table.insert(record)?;
    }
    Ok(table)
}
