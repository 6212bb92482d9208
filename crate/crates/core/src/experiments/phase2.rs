use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Result};
use crate::corpus::{pair_genders, BiasSample};
use crate::domain::{Attribute, Gender};
use crate::metrics::{
    average_reports, group_template_score, MajorityBackgrounds, MetricError, MetricReport,
};
use crate::scoring::ScoreTable;
use crate::stats::{friedman_with, gender_gap_test, wilcoxon_signed_rank, FriedmanOptions, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub metrics: MetricReport,
    /// Friedman across groups (templates as blocks), Wilcoxon when exactly
    /// two groups, absent for single-group cells.
    pub group_test: Option<TestResult>,
}

/// Paired female-minus-male test for one attribute and language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderGap {
    pub attribute: Attribute,
    pub language: String,
    pub model_id: String,
    pub n_pairs: usize,
    pub mean_difference: f64,
    pub test: TestResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub attribute: Attribute,
    pub language: String,
    pub gender: Option<Gender>,
    pub model_id: String,
    pub reason: String,
}

/// One group's mean score, for distribution plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPoint {
    pub model_id: String,
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    pub group: String,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase2Report {
    pub languages: Vec<String>,
    pub attributes: Vec<Attribute>,
    pub models: Vec<String>,
    pub cells: Vec<CellReport>,
    pub gender_gaps: Vec<GenderGap>,
    pub skipped: Vec<SkippedCell>,
    /// Seed-family means, keyed by family id in `model_id`.
    pub averaged: Vec<MetricReport>,
    pub v_distributions: Vec<VPoint>,
}

impl Phase2Report {
    /// Reports for `model`, which may be a model id or a seed-family id.
    pub fn reports_for(&self, model: &str) -> Vec<&MetricReport> {
        let averaged: Vec<&MetricReport> = self.averaged.iter().filter(|r| r.model_id == model).collect();
        if !averaged.is_empty() {
            return averaged;
        }
        self.cells
            .iter()
            .map(|c| &c.metrics)
            .filter(|r| r.model_id == model)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Options {
    pub majority: MajorityBackgrounds,
    pub friedman: FriedmanOptions,
    pub jobs: usize,
}

impl Phase2Options {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            majority: MajorityBackgrounds::published().with_overrides(&config.majority_groups),
            friedman: FriedmanOptions::default(),
            jobs: config.jobs,
        }
    }
}

/// Family id of a model: the id with a trailing `-seed<digits>` removed.
pub fn model_family(model_id: &str) -> &str {
    match model_id.rsplit_once("-seed") {
        Some((stem, digits))
            if !stem.is_empty() && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) =>
        {
            stem
        }
        _ => model_id,
    }
}

pub fn run_phase2(
    config: &ExperimentConfig,
    samples: &[BiasSample],
    scores: &BTreeMap<String, ScoreTable>,
) -> Result<Phase2Report> {
    run_phase2_with(
        &config.languages,
        &config.attributes,
        samples,
        scores,
        &Phase2Options::from_config(config),
    )
}

enum Task<'a> {
    Cell {
        model: &'a str,
        attribute: Attribute,
        language: &'a str,
        gender: Gender,
    },
    Gap {
        model: &'a str,
        attribute: Attribute,
        language: &'a str,
    },
}

enum Outcome {
    Cell(CellReport),
    Gap(GenderGap),
    Skipped(SkippedCell),
}

/// Evaluates every (attribute, language, gender, model) cell plus one gender
/// gap per (attribute, language, model). Cells run on up to `jobs` threads;
/// the report is assembled in canonical order afterwards.
pub fn run_phase2_with(
    languages: &[String],
    attributes: &[Attribute],
    samples: &[BiasSample],
    scores: &BTreeMap<String, ScoreTable>,
    options: &Phase2Options,
) -> Result<Phase2Report> {
    // (attribute, language) -> samples, in sample-id order
    let mut slices: BTreeMap<(Attribute, &str), Vec<BiasSample>> = BTreeMap::new();
    for s in samples {
        slices.entry((s.attribute, s.language.as_str())).or_default().push(s.clone());
    }

    let mut tasks = Vec::new();
    let mut skipped = Vec::new();
    for (model, table) in scores {
        for language in languages {
            let covered = samples
                .iter()
                .filter(|s| &s.language == language && attributes.contains(&s.attribute))
                .any(|s| table.contains(&s.sample_id));
            for &attribute in attributes {
                if !covered {
                    skipped.push(SkippedCell {
                        attribute,
                        language: language.clone(),
                        gender: None,
                        model_id: model.clone(),
                        reason: format!("no scores for language {language}"),
                    });
                    continue;
                }
                for gender in Gender::BOTH {
                    tasks.push(Task::Cell {
                        model,
                        attribute,
                        language,
                        gender,
                    });
                }
                tasks.push(Task::Gap {
                    model,
                    attribute,
                    language,
                });
            }
        }
    }

    let empty = Vec::new();
    let run = |task: &Task| -> Result<Outcome> {
        match *task {
            Task::Cell {
                model,
                attribute,
                language,
                gender,
            } => {
                let slice = slices.get(&(attribute, language)).unwrap_or(&empty);
                evaluate_cell(slice, &scores[model], model, attribute, language, gender, options)
            }
            Task::Gap {
                model,
                attribute,
                language,
            } => {
                let slice = slices.get(&(attribute, language)).unwrap_or(&empty);
                evaluate_gap(slice, &scores[model], model, attribute, language)
            }
        }
    };
    let outcomes = run_parallel(&tasks, options.jobs.max(1), run)?;

    let mut cells = Vec::new();
    let mut gender_gaps = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Cell(c) => cells.push(c),
            Outcome::Gap(g) => gender_gaps.push(g),
            Outcome::Skipped(s) => skipped.push(s),
        }
    }
    let averaged = average_families(&cells)?;
    let v_distributions = cells
        .iter()
        .flat_map(|c| {
            let m = &c.metrics;
            m.v.iter().map(move |(group, v)| VPoint {
                model_id: m.model_id.clone(),
                attribute: m.attribute,
                language: m.language.clone(),
                gender: m.gender,
                group: group.clone(),
                v: *v,
            })
        })
        .collect();

    Ok(Phase2Report {
        languages: languages.to_vec(),
        attributes: attributes.to_vec(),
        models: scores.keys().cloned().collect(),
        cells,
        gender_gaps,
        skipped,
        averaged,
        v_distributions,
    })
}

/// Runs `f` over `tasks` on up to `jobs` threads; results keep task order.
fn run_parallel<T: Sync, R: Send>(
    tasks: &[T],
    jobs: usize,
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    if jobs <= 1 || tasks.len() <= 1 {
        return tasks.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let out = f(&tasks[i]);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|slot| slot.expect("every task ran"))
        .collect()
}

fn evaluate_cell(
    slice: &[BiasSample],
    table: &ScoreTable,
    model: &str,
    attribute: Attribute,
    language: &str,
    gender: Gender,
    options: &Phase2Options,
) -> Result<Outcome> {
    let matrix = match group_template_score(slice, table, attribute, language, gender) {
        Ok(m) => m,
        Err(MetricError::NoSamples { .. }) => {
            return Ok(Outcome::Skipped(SkippedCell {
                attribute,
                language: language.to_string(),
                gender: Some(gender),
                model_id: model.to_string(),
                reason: "no samples".into(),
            }))
        }
        Err(e) => return Err(e.into()),
    };
    let n_samples = slice.iter().filter(|s| s.gender == gender).count();
    let majority = if options.majority.has_attribute(attribute) {
        Some(options.majority.majority(attribute, language)?)
    } else {
        None
    };
    let metrics = MetricReport::compute(&matrix, model, n_samples, majority)?;
    let group_test = match matrix.n_groups() {
        0 | 1 => None,
        2 => Some(wilcoxon_signed_rank(&matrix.values()[0], &matrix.values()[1])?),
        _ if matrix.n_templates() < 2 => None,
        _ => Some(friedman_with(&matrix.transposed(), &options.friedman)?),
    };
    Ok(Outcome::Cell(CellReport { metrics, group_test }))
}

fn evaluate_gap(
    slice: &[BiasSample],
    table: &ScoreTable,
    model: &str,
    attribute: Attribute,
    language: &str,
) -> Result<Outcome> {
    if slice.is_empty() {
        return Ok(Outcome::Skipped(SkippedCell {
            attribute,
            language: language.to_string(),
            gender: None,
            model_id: model.to_string(),
            reason: "no samples for gender gap".into(),
        }));
    }
    let pairs: Vec<(String, String)> = if attribute == Attribute::Gender {
        pair_by_template(slice)?
    } else {
        pair_genders(slice)?
    };
    let lookup = |id: &str| -> Result<f64> {
        table
            .p_positive(id)
            .ok_or_else(|| MetricError::MissingScore(vec![id.to_string()]).into())
    };
    let mut female = Vec::with_capacity(pairs.len());
    let mut male = Vec::with_capacity(pairs.len());
    for (f, m) in &pairs {
        female.push(lookup(f)?);
        male.push(lookup(m)?);
    }
    let diff_sum: f64 = female.iter().zip(&male).map(|(f, m)| f - m).sum();
    Ok(Outcome::Gap(GenderGap {
        attribute,
        language: language.to_string(),
        model_id: model.to_string(),
        n_pairs: pairs.len(),
        mean_difference: diff_sum / pairs.len() as f64,
        test: gender_gap_test(&female, &male)?,
    }))
}

/// Gender-attribute samples pair on template and term index; their group is
/// the gender itself.
fn pair_by_template(slice: &[BiasSample]) -> Result<Vec<(String, String)>> {
    let mut slots: BTreeMap<(&str, usize), [Option<&str>; 2]> = BTreeMap::new();
    for s in slice {
        let slot = &mut slots
            .entry((s.template_id.as_str(), s.identity_term_index))
            .or_insert([None, None])[s.gender as usize];
        if slot.is_some() {
            return Err(crate::corpus::CorpusError::UnpairedSample(s.sample_id.clone()).into());
        }
        *slot = Some(&s.sample_id);
    }
    slots
        .into_values()
        .map(|pair| match pair {
            [Some(f), Some(m)] => Ok((f.to_string(), m.to_string())),
            [Some(lone), None] | [None, Some(lone)] => {
                Err(crate::corpus::CorpusError::UnpairedSample(lone.to_string()).into())
            }
            [None, None] => unreachable!("slot created without a sample"),
        })
        .collect()
}

/// Mean reports per seed family with at least two members, over the cells
/// every member covers.
fn average_families(cells: &[CellReport]) -> Result<Vec<MetricReport>> {
    let mut members: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in cells {
        members
            .entry(model_family(&c.metrics.model_id))
            .or_default()
            .insert(&c.metrics.model_id);
    }
    let mut out = Vec::new();
    for (family, models) in members.into_iter().filter(|(_, m)| m.len() >= 2) {
        type CellKey<'a> = (Attribute, &'a str, Gender);
        let mut grouped: BTreeMap<CellKey<'_>, Vec<MetricReport>> = BTreeMap::new();
        for c in cells.iter().filter(|c| models.contains(c.metrics.model_id.as_str())) {
            let m = &c.metrics;
            grouped
                .entry((m.attribute, m.language.as_str(), m.gender))
                .or_default()
                .push(m.clone());
        }
        for reports in grouped.into_values().filter(|r| r.len() == models.len()) {
            out.push(average_reports(&reports, family)?);
        }
    }
    Ok(out)
}
