use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{placeholder_roles, CorpusError, Lexicon, LexiconKey, Result, Role, TemplateSet};
use crate::domain::{Attribute, Gender, SentimentLabel};

/// A fully substituted probing sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasSample {
    pub sample_id: String,
    pub template_id: String,
    pub attribute: Attribute,
    pub group: String,
    pub language: String,
    pub gender: Gender,
    pub identity_term_index: usize,
    pub text: String,
    pub gold_label: SentimentLabel,
}

/// The tuple encoded in a sample id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleKey {
    pub attribute: Attribute,
    pub template_id: String,
    pub language: String,
    pub gender: Gender,
    pub group: String,
    pub term_index: usize,
}

fn check_component(component: &'static str, value: &str) -> Result<()> {
    if value.is_empty() || value.contains(':') {
        return Err(CorpusError::IllegalCharacter {
            component,
            value: value.to_string(),
        });
    }
    Ok(())
}

pub fn make_sample_id(
    attribute: Attribute,
    template_id: &str,
    language: &str,
    gender: Gender,
    group: &str,
    term_index: usize,
) -> Result<String> {
    check_component("template_id", template_id)?;
    check_component("language", language)?;
    check_component("group", group)?;
    Ok(format!(
        "{attribute}:{template_id}:{language}:{gender}:{group}:{term_index}"
    ))
}

pub fn parse_sample_id(id: &str) -> Result<SampleKey> {
    let malformed = || CorpusError::MalformedSampleId(id.to_string());
    let parts: Vec<&str> = id.split(':').collect();
    let [attribute, template_id, language, gender, group, index] = parts[..] else {
        return Err(malformed());
    };
    if template_id.is_empty() || language.is_empty() || group.is_empty() {
        return Err(malformed());
    }
    // Reject "+1", "01" and the like so the mapping stays bijective.
    if index.is_empty() || (index.len() > 1 && index.starts_with('0')) || !index.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    Ok(SampleKey {
        attribute: attribute.parse().map_err(|_| malformed())?,
        template_id: template_id.to_string(),
        language: language.to_string(),
        gender: gender.parse().map_err(|_| malformed())?,
        group: group.to_string(),
        term_index: index.parse().map_err(|_| malformed())?,
    })
}

fn substitute(text: &str, fills: &[(Role, &str)]) -> String {
    let mut out = text.to_string();
    for (role, term) in fills {
        out = out.replace(role.placeholder(), term);
    }
    out
}

/// Expands every selected template into one sample per
/// (language, gender, group, identity-term index), sorted by sample id.
///
/// Gender-attribute templates carry no slots; the subject gender is the group,
/// so each yields exactly one sample per (language, gender).
pub fn expand(
    templates: &TemplateSet,
    lexicon: &Lexicon,
    languages: &[String],
    attributes: &[Attribute],
) -> Result<Vec<BiasSample>> {
    let mut samples = Vec::new();
    for template in templates
        .templates
        .iter()
        .filter(|t| attributes.contains(&t.attribute))
    {
        let groups = if template.attribute == Attribute::Gender {
            Vec::new()
        } else {
            lexicon.groups(template.attribute)
        };
        for language in languages {
            for gender in Gender::BOTH {
                let variant = template.variant(language, gender).ok_or_else(|| {
                    CorpusError::MissingLanguageVariant {
                        template_id: template.template_id.clone(),
                        language: language.clone(),
                        gender,
                    }
                })?;
                let roles = placeholder_roles(&variant.text).map_err(|placeholder| {
                    CorpusError::UnknownPlaceholderRole {
                        template_id: template.template_id.clone(),
                        placeholder,
                    }
                })?;

                if template.attribute == Attribute::Gender {
                    if !roles.is_empty() {
                        return Err(CorpusError::PlaceholderMismatch {
                            template_id: template.template_id.clone(),
                            detail: "gender templates take no identity placeholders".into(),
                        });
                    }
                    samples.push(BiasSample {
                        sample_id: make_sample_id(
                            template.attribute,
                            &template.template_id,
                            language,
                            gender,
                            gender.as_str(),
                            0,
                        )?,
                        template_id: template.template_id.clone(),
                        attribute: template.attribute,
                        group: gender.as_str().to_string(),
                        language: language.clone(),
                        gender,
                        identity_term_index: 0,
                        text: variant.text.clone(),
                        gold_label: template.gold_label,
                    });
                    continue;
                }

                let mut used: Vec<Role> = roles.clone();
                used.sort();
                used.dedup();

                for group in &groups {
                    let mut term_lists: Vec<(Role, &[String])> = Vec::with_capacity(used.len());
                    for &role in &used {
                        let key = LexiconKey {
                            attribute: template.attribute,
                            group: group.clone(),
                            language: language.clone(),
                            gender,
                            role,
                        };
                        let terms = lexicon
                            .terms(&key)
                            .ok_or_else(|| CorpusError::MissingLexiconEntry(key.to_string()))?;
                        term_lists.push((role, terms));
                    }
                    let count = term_lists.first().map_or(1, |(_, t)| t.len());
                    if term_lists.iter().any(|(_, t)| t.len() != count) {
                        return Err(CorpusError::TermCountMismatch {
                            template_id: template.template_id.clone(),
                            key: format!("({group}, {language}, {gender})"),
                        });
                    }
                    for index in 0..count {
                        let fills: Vec<(Role, &str)> = term_lists
                            .iter()
                            .map(|(role, terms)| (*role, terms[index].as_str()))
                            .collect();
                        samples.push(BiasSample {
                            sample_id: make_sample_id(
                                template.attribute,
                                &template.template_id,
                                language,
                                gender,
                                group,
                                index,
                            )?,
                            template_id: template.template_id.clone(),
                            attribute: template.attribute,
                            group: group.clone(),
                            language: language.clone(),
                            gender,
                            identity_term_index: index,
                            text: substitute(&variant.text, &fills),
                            gold_label: template.gold_label,
                        });
                    }
                }
            }
        }
    }
    samples.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    Ok(samples)
}

/// Pairs every female-subject sample with the male-subject sample sharing its
/// template, language, group and term index. Output is sorted by female id.
pub fn pair_genders(samples: &[BiasSample]) -> Result<Vec<(String, String)>> {
    type PairKey<'a> = (Attribute, &'a str, &'a str, &'a str, usize);
    let mut slots: BTreeMap<PairKey<'_>, [Option<&str>; 2]> = BTreeMap::new();
    for s in samples {
        if s.attribute == Attribute::Gender {
            return Err(CorpusError::GenderNotPairable(s.sample_id.clone()));
        }
        let key = (
            s.attribute,
            s.template_id.as_str(),
            s.language.as_str(),
            s.group.as_str(),
            s.identity_term_index,
        );
        let slot = &mut slots.entry(key).or_insert([None, None])[s.gender as usize];
        if slot.is_some() {
            return Err(CorpusError::UnpairedSample(s.sample_id.clone()));
        }
        *slot = Some(&s.sample_id);
    }
    let mut pairs = Vec::with_capacity(slots.len());
    for [female, male] in slots.into_values() {
        match (female, male) {
            (Some(f), Some(m)) => pairs.push((f.to_string(), m.to_string())),
            (Some(lone), None) | (None, Some(lone)) => {
                return Err(CorpusError::UnpairedSample(lone.to_string()))
            }
            (None, None) => unreachable!("slot created without a sample"),
        }
    }
    pairs.sort();
    Ok(pairs)
}
