use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::domain::SentimentLabel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub record_id: String,
    pub text: String,
    pub label: SentimentLabel,
}

/// Finetuning or test corpus. Record ids are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    records: Vec<LabeledRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
}

impl LabelCounts {
    fn get(&self, label: SentimentLabel) -> usize {
        match label {
            SentimentLabel::Positive => self.positive,
            SentimentLabel::Negative => self.negative,
            SentimentLabel::Neutral => self.neutral,
        }
    }
}

impl LabeledDataset {
    pub fn new(records: Vec<LabeledRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.record_id.as_str()) {
                return Err(CorpusError::DuplicateRecordId(r.record_id.clone()));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[LabeledRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn counts(&self) -> LabelCounts {
        let mut c = LabelCounts::default();
        for r in &self.records {
            match r.label {
                SentimentLabel::Positive => c.positive += 1,
                SentimentLabel::Negative => c.negative += 1,
                SentimentLabel::Neutral => c.neutral += 1,
            }
        }
        c
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Records with `label`, ordered by record id.
    fn by_label(&self, label: SentimentLabel) -> Vec<&LabeledRecord> {
        let mut v: Vec<_> = self.records.iter().filter(|r| r.label == label).collect();
        v.sort_by(|a, b| a.record_id.cmp(&b.record_id));
        v
    }
}

pub fn parse_labeled_dataset(bytes: &[u8]) -> Result<LabeledDataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::MalformedJson(e.to_string()))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: LabeledRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::MalformedJson(format!("line {}: {e}", i + 1)))?;
        records.push(record);
    }
    LabeledDataset::new(records)
}

fn subsample<'a>(
    rng: &mut ChaCha8Rng,
    pool: &[&'a LabeledRecord],
    amount: usize,
) -> Vec<&'a LabeledRecord> {
    index::sample(rng, pool.len(), amount)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

fn finish(mut picked: Vec<&LabeledRecord>) -> LabeledDataset {
    picked.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    LabeledDataset {
        records: picked.into_iter().cloned().collect(),
    }
}

/// Subsamples the majority label so positive and negative counts are equal.
/// Output is sorted by record id.
pub fn balance_labels(dataset: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    if let Some(r) = dataset
        .records
        .iter()
        .find(|r| r.label == SentimentLabel::Neutral)
    {
        return Err(CorpusError::NeutralLabelPresent(r.record_id.clone()));
    }
    let pos = dataset.by_label(SentimentLabel::Positive);
    let neg = dataset.by_label(SentimentLabel::Negative);
    let target = pos.len().min(neg.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = subsample(&mut rng, &pos, target);
    picked.extend(subsample(&mut rng, &neg, target));
    Ok(finish(picked))
}

fn stream_id(language: &str) -> u64 {
    // FNV-1a
    language.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Downsamples every language to the per-label minimum across languages.
/// Each language draws from its own seeded stream, so adding a language does
/// not change the subsets picked for the others.
pub fn downsample_equal(
    datasets: &BTreeMap<String, LabeledDataset>,
    seed: u64,
) -> Result<BTreeMap<String, LabeledDataset>> {
    if datasets.is_empty() {
        return Err(CorpusError::NoDatasets);
    }
    let labels = [
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
    ];
    for (language, ds) in datasets {
        let counts = ds.counts();
        for label in [SentimentLabel::Positive, SentimentLabel::Negative] {
            if counts.get(label) == 0 {
                return Err(CorpusError::EmptyLabelClass {
                    language: language.clone(),
                    label,
                });
            }
        }
    }
    let targets: Vec<usize> = labels
        .iter()
        .map(|&l| datasets.values().map(|d| d.counts().get(l)).min().unwrap_or(0))
        .collect();

    let mut out = BTreeMap::new();
    for (language, ds) in datasets {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(language));
        let mut picked = Vec::new();
        for (label, &target) in labels.iter().zip(&targets) {
            picked.extend(subsample(&mut rng, &ds.by_label(*label), target));
        }
        out.insert(language.clone(), finish(picked));
    }
    Ok(out)
}
