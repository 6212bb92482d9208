use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{compute_accuracy, AccuracyMode, ExperimentError, PredictionRecord, Result};
use crate::stats::{mcnemar, partition_languages, PValueMatrix, PairedPredictions, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub n: usize,
    pub three_way: f64,
    /// Absent when every gold label is neutral.
    pub two_way: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Report {
    pub alpha: f64,
    pub accuracy: BTreeMap<String, AccuracyRow>,
    pub pairwise: Vec<PairwiseTest>,
    pub p_values: PValueMatrix,
    pub language_sets: Vec<Vec<String>>,
}

/// Accuracy per language, McNemar for every language pair, and the language
/// sets whose members are joined by non-significant pairs. Languages appear
/// in the order given.
pub fn run_phase1(
    predictions: &[(String, Vec<PredictionRecord>)],
    alpha: f64,
) -> Result<Phase1Report> {
    if predictions.is_empty() {
        return Err(ExperimentError::UnalignedTestSets("no prediction files".into()));
    }
    // language -> id -> record
    let mut by_id: Vec<(&str, BTreeMap<&str, &PredictionRecord>)> = Vec::new();
    for (language, records) in predictions {
        if let Some(bad) = records.iter().find(|r| &r.language != language) {
            return Err(ExperimentError::UnalignedTestSets(format!(
                "`{}` in the {language} file is labelled {}",
                bad.sample_id, bad.language
            )));
        }
        by_id.push((language, records.iter().map(|r| (r.sample_id.as_str(), r)).collect()));
    }

    let (first_lang, reference) = &by_id[0];
    for (language, map) in &by_id[1..] {
        if map.keys().ne(reference.keys()) {
            let extra = map
                .keys()
                .find(|k| !reference.contains_key(*k))
                .or_else(|| reference.keys().find(|k| !map.contains_key(*k)))
                .copied()
                .unwrap_or("");
            return Err(ExperimentError::UnalignedTestSets(format!(
                "{language} and {first_lang} differ on sample `{extra}`"
            )));
        }
        for (id, record) in map {
            if record.gold_label != reference[id].gold_label {
                return Err(ExperimentError::UnalignedTestSets(format!(
                    "gold label of `{id}` differs between {first_lang} and {language}"
                )));
            }
        }
    }

    let ids: Vec<String> = reference.keys().map(|s| s.to_string()).collect();
    let gold: Vec<_> = reference.values().map(|r| r.gold_label).collect();
    let preds: Vec<Vec<_>> = by_id
        .iter()
        .map(|(_, m)| m.values().map(|r| r.pred_label).collect())
        .collect();

    let mut accuracy = BTreeMap::new();
    for ((language, _), p) in by_id.iter().zip(&preds) {
        let two_way = match compute_accuracy(p, &gold, AccuracyMode::TwoWay) {
            Ok(a) => Some(a),
            Err(ExperimentError::EmptyAfterFilter) => None,
            Err(e) => return Err(e),
        };
        accuracy.insert(
            language.to_string(),
            AccuracyRow {
                n: gold.len(),
                three_way: compute_accuracy(p, &gold, AccuracyMode::ThreeWay)?,
                two_way,
            },
        );
    }

    let languages: Vec<String> = by_id.iter().map(|(l, _)| l.to_string()).collect();
    let k = languages.len();
    let mut matrix = vec![vec![1.0; k]; k];
    let mut pairwise = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let pair = PairedPredictions::new(ids.clone(), gold.clone(), preds[i].clone(), preds[j].clone())?;
            let result = mcnemar(&pair);
            matrix[i][j] = result.p_value;
            matrix[j][i] = result.p_value;
            pairwise.push(PairwiseTest {
                a: languages[i].clone(),
                b: languages[j].clone(),
                result,
            });
        }
    }
    let p_values = PValueMatrix {
        languages,
        p: matrix,
    };
    let language_sets = partition_languages(&p_values, alpha)?;
    Ok(Phase1Report {
        alpha,
        accuracy,
        pairwise,
        p_values,
        language_sets,
    })
}
