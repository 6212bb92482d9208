use std::collections::{BTreeMap, BTreeSet};

use super::{io_failure, read_predictions, ExperimentConfig, ExperimentError, PredictionRecord, Result};
use crate::corpus::{expand, parse_lexicon_file, parse_template_document, BiasSample, Lexicon, TemplateSet};
use crate::scoring::{load_score_files, score_samples, ScoreTable, ScorerMode};

fn read(path: &std::path::Path) -> Result<Vec<u8>> {
    if !path.exists() {
        return Err(ExperimentError::MissingPath(path.to_path_buf()));
    }
    std::fs::read(path).map_err(|e| io_failure(path, e))
}

/// Parses and merges every configured template and lexicon file, then checks
/// the templates against the configured languages.
pub fn load_corpus(config: &ExperimentConfig) -> Result<(TemplateSet, Lexicon)> {
    if config.templates.is_empty() || config.lexicons.is_empty() {
        return Err(ExperimentError::MalformedConfig(
            "templates and lexicons are required for this step".into(),
        ));
    }
    let mut sets = Vec::new();
    for path in &config.templates {
        sets.push(parse_template_document(&read(path)?)?);
    }
    let templates = TemplateSet::merge(sets);
    templates.check(&config.languages)?;
    let mut lexicons = Vec::new();
    for path in &config.lexicons {
        lexicons.push(parse_lexicon_file(&read(path)?)?);
    }
    Ok((templates, Lexicon::merge(lexicons)?))
}

pub fn expand_from_config(config: &ExperimentConfig) -> Result<Vec<BiasSample>> {
    let (templates, lexicon) = load_corpus(config)?;
    Ok(expand(&templates, &lexicon, &config.languages, &config.attributes)?)
}

/// Scores for every configured model, keyed by model id. File-mode tables
/// keep only the requested ids; coverage is checked by the phase runners.
pub fn score_models(
    config: &ExperimentConfig,
    samples: &[BiasSample],
) -> Result<BTreeMap<String, ScoreTable>> {
    let wanted: BTreeSet<&str> = samples.iter().map(|s| s.sample_id.as_str()).collect();
    let mut out = BTreeMap::new();
    for model in &config.models {
        let table = match model.mode {
            ScorerMode::File => {
                model.validate()?;
                let all = load_score_files(&model.score_files)?;
                ScoreTable::from_records(
                    all.records()
                        .filter(|r| wanted.contains(r.sample_id.as_str()))
                        .cloned(),
                )?
            }
            _ => score_samples(samples, model)?,
        };
        out.insert(model.model_id.clone(), table);
    }
    Ok(out)
}

/// Prediction files in configured language order.
pub fn load_predictions(config: &ExperimentConfig) -> Result<Vec<(String, Vec<PredictionRecord>)>> {
    let mut out = Vec::new();
    for language in &config.languages {
        if let Some(path) = config.predictions.get(language) {
            out.push((language.clone(), read_predictions(&read(path)?)?));
        }
    }
    if out.is_empty() {
        return Err(ExperimentError::MalformedConfig("no prediction files configured".into()));
    }
    Ok(out)
}
