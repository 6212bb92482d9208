use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{MetricError, Result};
use crate::corpus::BiasSample;
use crate::domain::{Attribute, Gender};
use crate::scoring::ScoreTable;

/// Dense groups x templates matrix of mean positive probabilities for one
/// (attribute, language, gender) cell. `values[i][j]` is group i on template j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    groups: Vec<String>,
    templates: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(
        attribute: Attribute,
        language: impl Into<String>,
        gender: Gender,
        groups: Vec<String>,
        templates: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if groups.is_empty() || templates.is_empty() {
            return Err(MetricError::InvalidMatrix(
                "need at least one group and one template".into(),
            ));
        }
        if groups.iter().collect::<BTreeSet<_>>().len() != groups.len() {
            return Err(MetricError::InvalidMatrix("duplicate group name".into()));
        }
        if values.len() != groups.len() || values.iter().any(|row| row.len() != templates.len()) {
            return Err(MetricError::InvalidMatrix(format!(
                "values must be {} x {}",
                groups.len(),
                templates.len()
            )));
        }
        if let Some(bad) = values.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(MetricError::InvalidMatrix(format!("entry {bad} outside [0, 1]")));
        }
        Ok(Self {
            attribute,
            language: language.into(),
            gender,
            groups,
            templates,
            values,
        })
    }

    /// Convenience constructor with generated names `g0..`, `t0..`.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.len();
        let n = values.first().map_or(0, Vec::len);
        Self::new(
            Attribute::Race,
            "xx",
            Gender::Female,
            (0..m).map(|i| format!("g{i}")).collect(),
            (0..n).map(|j| format!("t{j}")).collect(),
            values,
        )
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn templates(&self) -> &[String] {
        &self.templates
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn n_templates(&self) -> usize {
        self.templates.len()
    }

    pub fn get(&self, group: usize, template: usize) -> f64 {
        self.values[group][template]
    }

    pub fn group_index(&self, group: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == group)
    }

    /// Templates as rows, groups as columns: the blocks x treatments layout
    /// used by the Friedman test.
    pub fn transposed(&self) -> Vec<Vec<f64>> {
        (0..self.n_templates())
            .map(|j| self.values.iter().map(|row| row[j]).collect())
            .collect()
    }
}

/// Averages the identity-term samples of every (group, template) pair in the
/// selected cell. Groups and templates come out in lexicographic order.
pub fn group_template_score(
    samples: &[BiasSample],
    scores: &ScoreTable,
    attribute: Attribute,
    language: &str,
    gender: Gender,
) -> Result<ScoreMatrix> {
    let selected: Vec<&BiasSample> = samples
        .iter()
        .filter(|s| s.attribute == attribute && s.language == language && s.gender == gender)
        .collect();
    if selected.is_empty() {
        return Err(MetricError::NoSamples {
            attribute,
            language: language.to_string(),
            gender,
        });
    }

    let mut missing: Vec<String> = selected
        .iter()
        .filter(|s| !scores.contains(&s.sample_id))
        .map(|s| s.sample_id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(MetricError::MissingScore(missing));
    }

    // (group, template) -> probabilities in term-index order
    let mut cells: BTreeMap<(&str, &str), Vec<(usize, f64)>> = BTreeMap::new();
    for s in &selected {
        let p = scores.p_positive(&s.sample_id).expect("checked above");
        cells
            .entry((s.group.as_str(), s.template_id.as_str()))
            .or_default()
            .push((s.identity_term_index, p));
    }
    let groups: Vec<String> = selected
        .iter()
        .map(|s| s.group.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let templates: Vec<String> = selected
        .iter()
        .map(|s| s.template_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut values = Vec::with_capacity(groups.len());
    for g in &groups {
        let mut row = Vec::with_capacity(templates.len());
        for t in &templates {
            let Some(cell) = cells.get_mut(&(g.as_str(), t.as_str())) else {
                return Err(MetricError::EmptyCell {
                    group: g.clone(),
                    template_id: t.clone(),
                });
            };
            cell.sort_by_key(|(index, _)| *index);
            let sum: f64 = cell.iter().map(|(_, p)| p).sum();
            row.push(sum / cell.len() as f64);
        }
        values.push(row);
    }
    ScoreMatrix::new(attribute, language, gender, groups, templates, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SentimentLabel;
    use crate::scoring::ScoreRecord;

    fn sample(group: &str, template: &str, index: usize) -> BiasSample {
        BiasSample {
            sample_id: format!("race:{template}:en:female:{group}:{index}"),
            template_id: template.into(),
            attribute: Attribute::Race,
            group: group.into(),
            language: "en".into(),
            gender: Gender::Female,
            identity_term_index: index,
            text: String::new(),
            gold_label: SentimentLabel::Neutral,
        }
    }

    #[test]
    fn averages_identity_terms() {
        let samples = vec![sample("Black", "r01", 0), sample("Black", "r01", 1)];
        let scores = ScoreTable::from_records([
            ScoreRecord::new("race:r01:en:female:Black:0", 0.2),
            ScoreRecord::new("race:r01:en:female:Black:1", 0.4),
        ])
        .unwrap();
        let m = group_template_score(&samples, &scores, Attribute::Race, "en", Gender::Female)
            .unwrap();
        assert_eq!(m.n_groups(), 1);
        assert_eq!(m.n_templates(), 1);
        assert!((m.get(0, 0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn missing_score_is_named() {
        let samples = vec![sample("Black", "r01", 0), sample("Asian", "r01", 0)];
        let scores =
            ScoreTable::from_records([ScoreRecord::new("race:r01:en:female:Black:0", 0.2)]).unwrap();
        assert_eq!(
            group_template_score(&samples, &scores, Attribute::Race, "en", Gender::Female)
                .unwrap_err(),
            MetricError::MissingScore(vec!["race:r01:en:female:Asian:0".into()])
        );
    }

    #[test]
    fn empty_cell_is_reported() {
        let samples = vec![
            sample("Black", "r01", 0),
            sample("Asian", "r01", 0),
            sample("Black", "r02", 0),
        ];
        let scores = crate::scoring::mock_score(&samples, 1);
        assert_eq!(
            group_template_score(&samples, &scores, Attribute::Race, "en", Gender::Female)
                .unwrap_err(),
            MetricError::EmptyCell {
                group: "Asian".into(),
                template_id: "r02".into()
            }
        );
    }

    #[test]
    fn rejects_malformed_matrices() {
        assert!(ScoreMatrix::from_rows(vec![]).is_err());
        assert!(ScoreMatrix::from_rows(vec![vec![0.1, 0.2], vec![0.3]]).is_err());
        assert!(ScoreMatrix::from_rows(vec![vec![1.5]]).is_err());
        assert!(ScoreMatrix::from_rows(vec![vec![f64::NAN]]).is_err());
    }
}
