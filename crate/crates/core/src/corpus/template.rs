use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::domain::{Attribute, Gender, SentimentLabel};

/// Grammatical role of an identity slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Adj,
    Noun,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Adj => "adj",
            Role::Noun => "noun",
        }
    }

    pub fn placeholder(self) -> &'static str {
        match self {
            Role::Adj => "{identity:adj}",
            Role::Noun => "{identity:noun}",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub language: String,
    pub gender: Gender,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub template_id: String,
    pub attribute: Attribute,
    pub gold_label: SentimentLabel,
    pub variants: Vec<Variant>,
}

impl Template {
    pub fn variant(&self, language: &str, gender: Gender) -> Option<&Variant> {
        self.variants
            .iter()
            .find(|v| v.language == language && v.gender == gender)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSet {
    pub templates: Vec<Template>,
}

impl TemplateSet {
    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn count(&self, attribute: Attribute) -> usize {
        self.templates
            .iter()
            .filter(|t| t.attribute == attribute)
            .count()
    }

    /// Every language mentioned by any variant, sorted.
    pub fn languages(&self) -> Vec<String> {
        self.templates
            .iter()
            .flat_map(|t| t.variants.iter().map(|v| v.language.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn get(&self, template_id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.template_id == template_id)
    }

    /// Concatenates several sets; id uniqueness is rechecked by [`TemplateSet::check`].
    pub fn merge(sets: impl IntoIterator<Item = TemplateSet>) -> TemplateSet {
        TemplateSet {
            templates: sets.into_iter().flat_map(|s| s.templates).collect(),
        }
    }

    /// Enforces every template invariant against `languages`, returning the
    /// first violation as an error.
    pub fn check(&self, languages: &[String]) -> Result<()> {
        let report = validate_parallel(self, languages);
        match report.findings.into_iter().next() {
            None => Ok(()),
            Some(finding) => Err(finding.into_error()),
        }
    }
}

/// Parses a template file without enforcing parallelism invariants.
pub fn parse_template_document(bytes: &[u8]) -> Result<TemplateSet> {
    serde_json::from_slice(bytes).map_err(|e| CorpusError::MalformedJson(e.to_string()))
}

/// Parses and validates a template file. The language list is the union of
/// the languages the file mentions.
pub fn parse_template_file(bytes: &[u8]) -> Result<TemplateSet> {
    let set = parse_template_document(bytes)?;
    set.check(&set.languages())?;
    Ok(set)
}

/// Scans `text` for `{...}` slots and returns their roles in order of appearance.
/// The error carries the offending slot text.
pub fn placeholder_roles(text: &str) -> std::result::Result<Vec<Role>, String> {
    let mut roles = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        let after = &rest[open..];
        let Some(close) = after.find('}') else {
            return Err(after.to_string());
        };
        let slot = &after[..=close];
        match slot {
            "{identity:adj}" => roles.push(Role::Adj),
            "{identity:noun}" => roles.push(Role::Noun),
            other => return Err(other.to_string()),
        }
        rest = &after[close + 1..];
    }
    if let Some(pos) = rest.find('}') {
        return Err(rest[pos..].chars().take(16).collect());
    }
    Ok(roles)
}

fn role_multiset(roles: &[Role]) -> BTreeMap<Role, usize> {
    let mut counts = BTreeMap::new();
    for role in roles {
        *counts.entry(*role).or_insert(0) += 1;
    }
    counts
}

/// One parallelism defect in a template file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DuplicateTemplateId {
        template_id: String,
    },
    MissingVariant {
        template_id: String,
        language: String,
        gender: Gender,
    },
    DuplicateVariant {
        template_id: String,
        language: String,
        gender: Gender,
    },
    UnknownPlaceholder {
        template_id: String,
        language: String,
        gender: Gender,
        placeholder: String,
    },
    PlaceholderMismatch {
        template_id: String,
        language: String,
        gender: Gender,
        detail: String,
    },
}

impl Finding {
    pub fn template_id(&self) -> &str {
        match self {
            Finding::DuplicateTemplateId { template_id }
            | Finding::MissingVariant { template_id, .. }
            | Finding::DuplicateVariant { template_id, .. }
            | Finding::UnknownPlaceholder { template_id, .. }
            | Finding::PlaceholderMismatch { template_id, .. } => template_id,
        }
    }

    fn into_error(self) -> CorpusError {
        match self {
            Finding::DuplicateTemplateId { template_id } => {
                CorpusError::DuplicateTemplateId(template_id)
            }
            Finding::MissingVariant {
                template_id,
                language,
                gender,
            } => CorpusError::MissingLanguageVariant {
                template_id,
                language,
                gender,
            },
            Finding::DuplicateVariant {
                template_id,
                language,
                gender,
            } => CorpusError::DuplicateVariant {
                template_id,
                language,
                gender,
            },
            Finding::UnknownPlaceholder {
                template_id,
                placeholder,
                ..
            } => CorpusError::UnknownPlaceholderRole {
                template_id,
                placeholder,
            },
            Finding::PlaceholderMismatch {
                template_id,
                language,
                gender,
                detail,
            } => CorpusError::PlaceholderMismatch {
                template_id,
                detail: format!("{language}/{gender}: {detail}"),
            },
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DuplicateTemplateId { template_id } => {
                write!(f, "{template_id}: duplicate template id")
            }
            Finding::MissingVariant {
                template_id,
                language,
                gender,
            } => write!(f, "{template_id}: missing {language}/{gender} variant"),
            Finding::DuplicateVariant {
                template_id,
                language,
                gender,
            } => write!(f, "{template_id}: duplicate {language}/{gender} variant"),
            Finding::UnknownPlaceholder {
                template_id,
                language,
                gender,
                placeholder,
            } => write!(
                f,
                "{template_id}: {language}/{gender} has unknown placeholder `{placeholder}`"
            ),
            Finding::PlaceholderMismatch {
                template_id,
                language,
                gender,
                detail,
            } => write!(f, "{template_id}: {language}/{gender} {detail}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Number of (template, language, gender) slots inspected.
    pub checked_variants: usize,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

fn describe(roles: &BTreeMap<Role, usize>) -> String {
    if roles.is_empty() {
        return "no placeholders".to_string();
    }
    roles
        .iter()
        .map(|(role, n)| format!("{n}x {}", role.placeholder()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Lists every missing/duplicate variant and placeholder defect of `set`
/// relative to `languages`. Findings are data; this never fails.
pub fn validate_parallel(set: &TemplateSet, languages: &[String]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen_ids = BTreeSet::new();

    for template in &set.templates {
        let id = &template.template_id;
        if !seen_ids.insert(id.as_str()) {
            report.findings.push(Finding::DuplicateTemplateId {
                template_id: id.clone(),
            });
        }

        // Reference multiset: taken from the first well-formed variant,
        // except gender templates which must carry none.
        let mut reference: Option<BTreeMap<Role, usize>> = if template.attribute == Attribute::Gender {
            Some(BTreeMap::new())
        } else {
            None
        };

        for language in languages {
            for gender in Gender::BOTH {
                report.checked_variants += 1;
                let matching: Vec<&Variant> = template
                    .variants
                    .iter()
                    .filter(|v| &v.language == language && v.gender == gender)
                    .collect();
                match matching.len() {
                    0 => {
                        report.findings.push(Finding::MissingVariant {
                            template_id: id.clone(),
                            language: language.clone(),
                            gender,
                        });
                        continue;
                    }
                    1 => {}
                    _ => report.findings.push(Finding::DuplicateVariant {
                        template_id: id.clone(),
                        language: language.clone(),
                        gender,
                    }),
                }
                let variant = matching[0];
                let roles = match placeholder_roles(&variant.text) {
                    Ok(roles) => role_multiset(&roles),
                    Err(placeholder) => {
                        report.findings.push(Finding::UnknownPlaceholder {
                            template_id: id.clone(),
                            language: language.clone(),
                            gender,
                            placeholder,
                        });
                        continue;
                    }
                };
                match &reference {
                    None => reference = Some(roles),
                    Some(expected) if *expected != roles => {
                        report.findings.push(Finding::PlaceholderMismatch {
                            template_id: id.clone(),
                            language: language.clone(),
                            gender,
                            detail: format!(
                                "has {} where {} is expected",
                                describe(&roles),
                                describe(expected)
                            ),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    report
}
