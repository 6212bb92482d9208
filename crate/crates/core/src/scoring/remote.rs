use std::collections::{BTreeMap, BTreeSet};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{read_scores, Result, ScoreRecord, ScoreTable, ScorerConfig, ScoringError};
use crate::corpus::BiasSample;
use crate::domain::SentimentLabel;

const BACKOFF_BASE: Duration = Duration::from_millis(50);
const BACKOFF_CAP: Duration = Duration::from_secs(2);
const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProbs {
    pub p_positive: f64,
    pub p_negative: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    /// Connection failures and 5xx responses; retried.
    #[error("{0}")]
    Unreachable(String),
    /// 4xx responses and undecodable bodies; not retried.
    #[error("{0}")]
    Schema(String),
}

/// The wire operations of the scoring service.
pub trait ScoreTransport: Sync {
    fn health(&self) -> std::result::Result<(), TransportError>;
    fn score(
        &self,
        model_id: &str,
        texts: &[String],
    ) -> std::result::Result<Vec<ClassProbs>, TransportError>;
    fn classify(&self, texts: &[String]) -> std::result::Result<Vec<String>, TransportError>;
}

/// JSON-over-HTTP client for `/healthz`, `/v1/score` and `/v1/classify`.
pub struct HttpTransport {
    base: String,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    model_id: &'a str,
    texts: &'a [String],
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<ClassProbs>,
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<String>,
}

impl HttpTransport {
    pub fn new(endpoint: &str) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Self {
            base: endpoint.trim_end_matches('/').to_string(),
            agent,
        }
    }

    fn map_err(e: ureq::Error) -> TransportError {
        match e {
            ureq::Error::StatusCode(code) if (400..500).contains(&code) => {
                TransportError::Schema(format!("HTTP {code}"))
            }
            ureq::Error::StatusCode(code) => TransportError::Unreachable(format!("HTTP {code}")),
            ureq::Error::Json(e) => TransportError::Schema(e.to_string()),
            other => TransportError::Unreachable(other.to_string()),
        }
    }
}

impl ScoreTransport for HttpTransport {
    fn health(&self) -> std::result::Result<(), TransportError> {
        self.agent
            .get(&format!("{}/healthz", self.base))
            .call()
            .map(|_| ())
            .map_err(Self::map_err)
    }

    fn score(
        &self,
        model_id: &str,
        texts: &[String],
    ) -> std::result::Result<Vec<ClassProbs>, TransportError> {
        let mut response = self
            .agent
            .post(&format!("{}/v1/score", self.base))
            .send_json(ScoreRequest { model_id, texts })
            .map_err(Self::map_err)?;
        let body: ScoreResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| TransportError::Schema(e.to_string()))?;
        Ok(body.scores)
    }

    fn classify(&self, texts: &[String]) -> std::result::Result<Vec<String>, TransportError> {
        let mut response = self
            .agent
            .post(&format!("{}/v1/classify", self.base))
            .send_json(ClassifyRequest { texts })
            .map_err(Self::map_err)?;
        let body: ClassifyResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| TransportError::Schema(e.to_string()))?;
        Ok(body.labels)
    }
}

fn with_retries<T>(
    retries: u32,
    mut call: impl FnMut() -> std::result::Result<T, TransportError>,
) -> std::result::Result<T, TransportError> {
    let mut delay = BACKOFF_BASE;
    let mut attempt = 0;
    loop {
        match call() {
            Err(TransportError::Unreachable(_)) if attempt < retries => {
                std::thread::sleep(delay);
                delay = (delay * 2).min(BACKOFF_CAP);
                attempt += 1;
            }
            other => return other,
        }
    }
}

fn load_cache(path: &Path, model_id: &str) -> Result<BTreeMap<String, f64>> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(e) => return Err(ScoringError::Cache(e.to_string())),
    };
    let text = String::from_utf8(bytes).map_err(|e| ScoringError::Cache(e.to_string()))?;
    let mut cached = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        // One line at a time: the append-only file may repeat ids across models.
        let table = read_scores(line.as_bytes())
            .map_err(|e| ScoringError::Cache(format!("line {}: {e}", i + 1)))?;
        for r in table.records() {
            if r.model_id.as_deref() == Some(model_id) {
                cached.entry(r.sample_id.clone()).or_insert(r.p_positive);
            }
        }
    }
    Ok(cached)
}

fn append_cache(path: &Path, records: &[ScoreRecord]) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| ScoringError::Cache(e.to_string()))?;
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).expect("score record serializes"));
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| ScoringError::Cache(e.to_string()))
}

fn check_scores(texts: usize, scores: &[ClassProbs]) -> std::result::Result<(), TransportError> {
    if scores.len() != texts {
        return Err(TransportError::Schema(format!(
            "{} scores returned for {texts} texts",
            scores.len()
        )));
    }
    for s in scores {
        let in_range = |p: f64| (0.0..=1.0).contains(&p);
        if !in_range(s.p_positive) || !in_range(s.p_negative) {
            return Err(TransportError::Schema(format!(
                "probabilities ({}, {}) outside [0, 1]",
                s.p_positive, s.p_negative
            )));
        }
        if (s.p_positive + s.p_negative - 1.0).abs() > SUM_TOLERANCE {
            return Err(TransportError::Schema(format!(
                "p_positive + p_negative = {} is not 1",
                s.p_positive + s.p_negative
            )));
        }
    }
    Ok(())
}

/// Scores through the HTTP service named by `config.endpoint`.
pub fn score_remote(samples: &[BiasSample], config: &ScorerConfig) -> Result<ScoreTable> {
    config.validate()?;
    let endpoint = config
        .endpoint
        .as_deref()
        .ok_or_else(|| ScoringError::InvalidConfig("remote mode requires an endpoint".into()))?;
    score_remote_with(samples, config, &HttpTransport::new(endpoint))
}

/// Scores every sample exactly once through `transport`.
///
/// The cache is consulted first (keyed by model id and sample id). Remaining
/// samples go out in `batch_size` chunks with at most `max_in_flight`
/// requests outstanding; each finished batch is appended to the cache before
/// the call returns, so a failed run keeps its progress.
pub fn score_remote_with(
    samples: &[BiasSample],
    config: &ScorerConfig,
    transport: &dyn ScoreTransport,
) -> Result<ScoreTable> {
    config.validate()?;
    let mut requested: BTreeMap<&str, &str> = BTreeMap::new();
    for s in samples {
        requested.entry(&s.sample_id).or_insert(&s.text);
    }

    let cached = match &config.cache_path {
        Some(path) => load_cache(path, &config.model_id)?,
        None => BTreeMap::new(),
    };
    let pending: Vec<(&str, &str)> = requested
        .iter()
        .filter(|(id, _)| !cached.contains_key(**id))
        .map(|(id, text)| (*id, *text))
        .collect();

    let results: Mutex<BTreeMap<String, f64>> = Mutex::new(BTreeMap::new());
    let failures: Mutex<BTreeMap<usize, TransportError>> = Mutex::new(BTreeMap::new());
    let cache_lock = Mutex::new(());
    let batches: Vec<&[(&str, &str)]> = pending.chunks(config.batch_size).collect();

    if !batches.is_empty() {
        with_retries(config.retry_count, || transport.health())
            .map_err(|e| ScoringError::Unreachable(e.to_string()))?;

        let next = AtomicUsize::new(0);
        let workers = config.max_in_flight.min(batches.len());
        let cache_error: Mutex<Option<ScoringError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::SeqCst);
                    let Some(batch) = batches.get(index) else {
                        break;
                    };
                    let texts: Vec<String> = batch.iter().map(|(_, t)| t.to_string()).collect();
                    let outcome = with_retries(config.retry_count, || {
                        transport.score(&config.model_id, &texts)
                    })
                    .and_then(|scores| check_scores(texts.len(), &scores).map(|_| scores));
                    match outcome {
                        Ok(scores) => {
                            let records: Vec<ScoreRecord> = batch
                                .iter()
                                .zip(&scores)
                                .map(|((id, _), s)| ScoreRecord {
                                    sample_id: id.to_string(),
                                    p_positive: s.p_positive,
                                    pred_label: None,
                                    model_id: Some(config.model_id.clone()),
                                })
                                .collect();
                            if let Some(path) = &config.cache_path {
                                let _guard = cache_lock.lock().unwrap();
                                if let Err(e) = append_cache(path, &records) {
                                    cache_error.lock().unwrap().get_or_insert(e);
                                }
                            }
                            let mut r = results.lock().unwrap();
                            for rec in records {
                                r.insert(rec.sample_id, rec.p_positive);
                            }
                        }
                        Err(e) => {
                            failures.lock().unwrap().insert(index, e);
                        }
                    }
                });
            }
        });
        if let Some(e) = cache_error.into_inner().unwrap() {
            return Err(e);
        }
    }

    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        if let Some(TransportError::Schema(msg)) = failures
            .values()
            .find(|e| matches!(e, TransportError::Schema(_)))
        {
            return Err(ScoringError::SchemaViolation(msg.clone()));
        }
        if failures.len() == batches.len() {
            let first = failures.values().next().expect("non-empty");
            return Err(ScoringError::Unreachable(first.to_string()));
        }
        let unscored: BTreeSet<String> = failures
            .keys()
            .flat_map(|&i| batches[i].iter().map(|(id, _)| id.to_string()))
            .collect();
        return Err(ScoringError::PartialFailure {
            unscored: unscored.into_iter().collect(),
        });
    }

    let mut table = ScoreTable::default();
    let fresh = results.into_inner().unwrap();
    for id in requested.keys() {
        let p = cached
            .get(*id)
            .or_else(|| fresh.get(*id))
            .copied()
            .ok_or_else(|| ScoringError::MissingScores(vec![id.to_string()]))?;
        table.insert(ScoreRecord {
            sample_id: id.to_string(),
            p_positive: p,
            pred_label: None,
            model_id: Some(config.model_id.clone()),
        })?;
    }
    Ok(table)
}

/// Labels from a generative classifier, in input order. `None` marks a
/// completion the service could not map to a label.
pub fn classify_remote(
    texts: &[String],
    config: &ScorerConfig,
    transport: &dyn ScoreTransport,
) -> Result<Vec<Option<SentimentLabel>>> {
    config.validate()?;
    let mut out = Vec::with_capacity(texts.len());
    for chunk in texts.chunks(config.batch_size) {
        let labels = with_retries(config.retry_count, || transport.classify(chunk)).map_err(
            |e| match e {
                TransportError::Unreachable(m) => ScoringError::Unreachable(m),
                TransportError::Schema(m) => ScoringError::SchemaViolation(m),
            },
        )?;
        if labels.len() != chunk.len() {
            return Err(ScoringError::SchemaViolation(format!(
                "{} labels returned for {} texts",
                labels.len(),
                chunk.len()
            )));
        }
        for label in labels {
            match label.as_str() {
                "unparseable" => out.push(None),
                other => out.push(Some(other.parse().map_err(|_| {
                    ScoringError::SchemaViolation(format!("unknown label `{other}`"))
                })?)),
            }
        }
    }
    Ok(out)
}
