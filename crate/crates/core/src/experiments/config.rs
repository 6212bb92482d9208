use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result};
use crate::domain::Attribute;
use crate::scoring::{ScorerConfig, ScorerMode};

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_ENV: &str = "BIASPROBE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// Same pretrained model, monolingual vs multilingual finetuning data.
    Finetune,
    /// Monolingual vs multilingual pretrained model.
    Pretrain,
}

impl ComparisonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Finetune => "finetune",
            Self::Pretrain => "pretrain",
        }
    }
}

/// One mono-vs-multi pairing; `mono` and `multi` name a model id or a seed
/// family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    pub kind: ComparisonKind,
    pub mono: String,
    pub multi: String,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_attributes() -> Vec<Attribute> {
    Attribute::ALL.to_vec()
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub languages: Vec<String>,
    #[serde(default = "default_attributes")]
    pub attributes: Vec<Attribute>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Extra or replacement majority groups; religion defaults always apply.
    #[serde(default)]
    pub majority_groups: BTreeMap<Attribute, BTreeMap<String, String>>,
    #[serde(default)]
    pub templates: Vec<PathBuf>,
    #[serde(default)]
    pub lexicons: Vec<PathBuf>,
    #[serde(default)]
    pub models: Vec<ScorerConfig>,
    #[serde(default)]
    pub predictions: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub comparisons: Vec<ComparisonSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl ExperimentConfig {
    /// Minimal config over `languages` with every default applied.
    pub fn new(languages: Vec<String>) -> Self {
        Self {
            languages,
            attributes: default_attributes(),
            alpha: default_alpha(),
            majority_groups: BTreeMap::new(),
            templates: Vec::new(),
            lexicons: Vec::new(),
            models: Vec::new(),
            predictions: BTreeMap::new(),
            comparisons: Vec::new(),
            seed: None,
            output_dir: None,
            jobs: default_jobs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let malformed = |m: String| Err(ExperimentError::MalformedConfig(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return malformed(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.languages.is_empty() {
            return malformed("at least one language is required".into());
        }
        if self.languages.iter().collect::<BTreeSet<_>>().len() != self.languages.len() {
            return malformed("duplicate language".into());
        }
        if let Some(bad) = self.languages.iter().find(|l| l.is_empty() || l.contains(':')) {
            return malformed(format!("invalid language code `{bad}`"));
        }
        if self.attributes.is_empty() {
            return malformed("at least one attribute is required".into());
        }
        if self.attributes.iter().collect::<BTreeSet<_>>().len() != self.attributes.len() {
            return malformed("duplicate attribute".into());
        }
        if self.jobs == 0 {
            return malformed("jobs must be >= 1".into());
        }
        let mut ids = BTreeSet::new();
        for model in &self.models {
            if model.model_id.is_empty() {
                return malformed("every model needs a model_id".into());
            }
            if !ids.insert(model.model_id.as_str()) {
                return malformed(format!("duplicate model_id `{}`", model.model_id));
            }
            model
                .validate()
                .map_err(|e| ExperimentError::MalformedConfig(format!("{}: {e}", model.model_id)))?;
        }
        if let Some(lang) = self.predictions.keys().find(|l| !self.languages.contains(l)) {
            return malformed(format!("predictions for unconfigured language `{lang}`"));
        }
        Ok(())
    }

    /// Every input path the config references.
    fn input_paths(&self) -> Vec<&Path> {
        let mut paths: Vec<&Path> = Vec::new();
        paths.extend(self.templates.iter().map(PathBuf::as_path));
        paths.extend(self.lexicons.iter().map(PathBuf::as_path));
        paths.extend(self.predictions.values().map(PathBuf::as_path));
        for model in &self.models {
            paths.extend(model.score_files.iter().map(PathBuf::as_path));
        }
        paths
    }

    fn resolve_relative_to(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.templates.iter_mut().for_each(join);
        self.lexicons.iter_mut().for_each(join);
        self.predictions.values_mut().for_each(join);
        for model in &mut self.models {
            model.score_files.iter_mut().for_each(join);
            if let Some(cache) = model.cache_path.as_mut() {
                join(cache);
            }
        }
        if let Some(out) = self.output_dir.as_mut() {
            join(out);
        }
    }
}

/// Parses and validates a config without touching the file system. Mock
/// scorers without their own seed inherit the top-level seed.
pub fn parse_config(bytes: &[u8]) -> Result<ExperimentConfig> {
    let mut config: ExperimentConfig =
        serde_json::from_slice(bytes).map_err(|e| ExperimentError::MalformedConfig(e.to_string()))?;
    for model in &mut config.models {
        if model.mode == ScorerMode::Mock && model.seed.is_none() {
            model.seed = config.seed;
        }
    }
    config.validate()?;
    Ok(config)
}

/// Reads a config file, resolves relative paths against its directory and
/// checks that every referenced input exists.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    if !path.is_file() {
        return Err(ExperimentError::MissingPath(path.to_path_buf()));
    }
    let bytes = std::fs::read(path).map_err(|e| super::io_failure(path, e))?;
    let mut config = parse_config(&bytes)?;
    config.resolve_relative_to(path.parent().unwrap_or(Path::new(".")));
    if let Some(missing) = config.input_paths().into_iter().find(|p| !p.exists()) {
        return Err(ExperimentError::MissingPath(missing.to_path_buf()));
    }
    Ok(config)
}

/// Output directory by precedence: explicit argument, `BIASPROBE_OUT`, config.
pub fn resolve_output_dir(explicit: Option<&Path>, config: Option<&ExperimentConfig>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    if let Some(env) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(env));
    }
    config.and_then(|c| c.output_dir.clone())
}
