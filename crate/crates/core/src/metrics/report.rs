use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mbcm, mcm, v, vbcm, MetricError, Result, ScoreMatrix};
use crate::domain::{Attribute, Gender};

/// All metrics for one (attribute, language, gender, model) cell.
///
/// `mcm` and `vbcm` are `None` when the cell holds a single group, which is
/// the case for every gender-attribute cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    pub model_id: String,
    pub n_groups: usize,
    pub n_templates: usize,
    pub n_samples: usize,
    pub mcm: Option<f64>,
    pub vbcm: Option<BTreeMap<String, f64>>,
    pub v: BTreeMap<String, f64>,
    pub majority_group: Option<String>,
    pub mbcm: Option<BTreeMap<String, f64>>,
}

impl MetricReport {
    pub fn compute(
        matrix: &ScoreMatrix,
        model_id: &str,
        n_samples: usize,
        majority_group: Option<&str>,
    ) -> Result<Self> {
        let multi = matrix.n_groups() >= 2;
        let mbcm = match majority_group {
            Some(g) => Some(mbcm(matrix, g)?),
            None => None,
        };
        Ok(Self {
            attribute: matrix.attribute,
            language: matrix.language.clone(),
            gender: matrix.gender,
            model_id: model_id.to_string(),
            n_groups: matrix.n_groups(),
            n_templates: matrix.n_templates(),
            n_samples,
            mcm: if multi { Some(mcm(matrix)?) } else { None },
            vbcm: if multi { Some(vbcm(matrix)?) } else { None },
            v: v(matrix),
            majority_group: majority_group.map(str::to_string),
            mbcm,
        })
    }

    /// `attribute/language/gender/model` label used in diagnostics.
    pub fn cell_label(&self) -> String {
        format!(
            "{}/{}/{}/{}",
            self.attribute, self.language, self.gender, self.model_id
        )
    }

    fn same_cell(&self, other: &Self) -> bool {
        self.attribute == other.attribute
            && self.language == other.language
            && self.gender == other.gender
    }
}

/// Per-attribute, per-language majority group used as the MBCM background.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBackgrounds {
    pub groups: BTreeMap<Attribute, BTreeMap<String, String>>,
}

impl MajorityBackgrounds {
    /// Religion only: Christianity for en/es/it, Judaism for he, Buddhism for zh.
    pub fn published() -> Self {
        let religion = [
            ("en", "Christianity"),
            ("es", "Christianity"),
            ("it", "Christianity"),
            ("he", "Judaism"),
            ("zh", "Buddhism"),
        ]
        .into_iter()
        .map(|(l, g)| (l.to_string(), g.to_string()))
        .collect();
        Self {
            groups: BTreeMap::from([(Attribute::Religion, religion)]),
        }
    }

    /// Entries in `overrides` replace or extend the current map.
    pub fn with_overrides(mut self, overrides: &BTreeMap<Attribute, BTreeMap<String, String>>) -> Self {
        for (attr, langs) in overrides {
            let slot = self.groups.entry(*attr).or_default();
            for (lang, group) in langs {
                slot.insert(lang.clone(), group.clone());
            }
        }
        self
    }

    pub fn has_attribute(&self, attribute: Attribute) -> bool {
        self.groups.contains_key(&attribute)
    }

    pub fn majority(&self, attribute: Attribute, language: &str) -> Result<&str> {
        self.groups
            .get(&attribute)
            .and_then(|m| m.get(language))
            .map(String::as_str)
            .ok_or_else(|| MetricError::UnknownLanguage(language.to_string()))
    }
}

pub fn majority_religion(language: &str) -> Result<String> {
    MajorityBackgrounds::published()
        .majority(Attribute::Religion, language)
        .map(str::to_string)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmDelta {
    pub delta: f64,
    pub amplified: bool,
}

/// `delta = mcm(multi) - mcm(mono)`; amplified iff delta is strictly positive.
pub fn mcm_delta(mono: &MetricReport, multi: &MetricReport) -> Result<McmDelta> {
    if !mono.same_cell(multi) {
        return Err(MetricError::MismatchedMetadata(format!(
            "{} vs {}",
            mono.cell_label(),
            multi.cell_label()
        )));
    }
    let a = mono.mcm.ok_or_else(|| MetricError::MissingMcm(mono.cell_label()))?;
    let b = multi.mcm.ok_or_else(|| MetricError::MissingMcm(multi.cell_label()))?;
    let delta = b - a;
    Ok(McmDelta {
        delta,
        amplified: delta > 0.0,
    })
}

fn mean_maps(maps: &[&BTreeMap<String, f64>]) -> Result<BTreeMap<String, f64>> {
    let first = maps[0];
    if maps.iter().any(|m| m.keys().ne(first.keys())) {
        return Err(MetricError::MismatchedMetadata("group sets differ".into()));
    }
    Ok(first
        .keys()
        .map(|k| {
            let sum: f64 = maps.iter().map(|m| m[k]).sum();
            (k.clone(), sum / maps.len() as f64)
        })
        .collect())
}

fn mean_optional_maps(
    maps: Vec<Option<&BTreeMap<String, f64>>>,
) -> Result<Option<BTreeMap<String, f64>>> {
    match maps.iter().copied().collect::<Option<Vec<_>>>() {
        Some(all) => mean_maps(&all).map(Some),
        None if maps.iter().all(Option::is_none) => Ok(None),
        None => Err(MetricError::MismatchedMetadata(
            "metric present in some reports only".into(),
        )),
    }
}

/// Arithmetic mean of every metric value across reports of the same cell.
/// Reports are combined in the order given.
pub fn average_reports(reports: &[MetricReport], model_id: &str) -> Result<MetricReport> {
    let Some(first) = reports.first() else {
        return Err(MetricError::MismatchedMetadata("no reports to average".into()));
    };
    for r in &reports[1..] {
        if !first.same_cell(r) || r.majority_group != first.majority_group {
            return Err(MetricError::MismatchedMetadata(format!(
                "{} vs {}",
                first.cell_label(),
                r.cell_label()
            )));
        }
    }
    let n = reports.len() as f64;
    let mcm = match reports.iter().map(|r| r.mcm).collect::<Option<Vec<f64>>>() {
        Some(values) => Some(values.iter().sum::<f64>() / n),
        None if reports.iter().all(|r| r.mcm.is_none()) => None,
        None => {
            return Err(MetricError::MismatchedMetadata(
                "metric present in some reports only".into(),
            ))
        }
    };
    Ok(MetricReport {
        attribute: first.attribute,
        language: first.language.clone(),
        gender: first.gender,
        model_id: model_id.to_string(),
        n_groups: first.n_groups,
        n_templates: first.n_templates,
        n_samples: first.n_samples,
        mcm,
        vbcm: mean_optional_maps(reports.iter().map(|r| r.vbcm.as_ref()).collect())?,
        v: mean_maps(&reports.iter().map(|r| &r.v).collect::<Vec<_>>())?,
        majority_group: first.majority_group.clone(),
        mbcm: mean_optional_maps(reports.iter().map(|r| r.mbcm.as_ref()).collect())?,
    })
}
