use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Result, Role};
use crate::domain::{Attribute, Gender};

/// The ordered group list of one attribute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub attribute: Attribute,
    pub groups: Vec<String>,
}

impl AttributeSpec {
    /// Builds a spec, keeping the given order. Fails on duplicate names.
    pub fn new(attribute: Attribute, groups: Vec<String>) -> std::result::Result<Self, String> {
        let mut seen = BTreeSet::new();
        for g in &groups {
            if !seen.insert(g.as_str()) {
                return Err(format!("duplicate group `{g}` for {attribute}"));
            }
        }
        Ok(Self { attribute, groups })
    }

    /// Groups used in the published multilingual study, sorted lexicographically.
    pub fn published(attribute: Attribute) -> Self {
        let names: &[&str] = match attribute {
            Attribute::Gender => &["male", "female"],
            Attribute::Race => &["White", "Hispanic", "Black", "Asian", "African American"],
            Attribute::Religion => &[
                "Buddhism",
                "Christianity",
                "Judaism",
                "Islam",
                "atheism",
                "Hinduism",
            ],
            Attribute::Nationality => &[
                "American", "Indian", "Canadian", "Australian", "Mexican", "Spanish", "Chinese",
                "Israeli", "Italian", "Russian", "Greek", "Polish", "German", "Japanese",
                "French", "Brazilian", "Swedish",
            ],
        };
        let mut groups: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        groups.sort();
        Self { attribute, groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LexiconKey {
    pub attribute: Attribute,
    pub group: String,
    pub language: String,
    pub gender: Gender,
    pub role: Role,
}

impl fmt::Display for LexiconKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.attribute, self.group, self.language, self.gender, self.role
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    #[serde(flatten)]
    pub key: LexiconKey,
    pub terms: Vec<String>,
}

/// Identity terms keyed by (attribute, group, language, gender, role).
/// Entry order is the file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: HashMap<LexiconKey, usize>,
}

#[derive(Deserialize)]
struct RawLexicon {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    attribute: String,
    group: String,
    language: String,
    gender: Gender,
    role: Role,
    terms: Vec<String>,
}

impl Lexicon {
    pub fn from_entries(entries: Vec<LexiconEntry>) -> Result<Self> {
        let mut lexicon = Lexicon::default();
        for entry in entries {
            lexicon.push(entry)?;
        }
        Ok(lexicon)
    }

    fn push(&mut self, entry: LexiconEntry) -> Result<()> {
        if entry.terms.is_empty() || entry.terms.iter().any(|t| t.is_empty()) {
            return Err(CorpusError::EmptyTermList(entry.key.to_string()));
        }
        if self.index.contains_key(&entry.key) {
            return Err(CorpusError::DuplicateLexiconEntry(entry.key.to_string()));
        }
        self.index.insert(entry.key.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Concatenates lexicons; a key present in more than one is an error.
    pub fn merge(lexicons: impl IntoIterator<Item = Lexicon>) -> Result<Self> {
        Self::from_entries(lexicons.into_iter().flat_map(|l| l.entries).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn terms(&self, key: &LexiconKey) -> Option<&[String]> {
        self.index.get(key).map(|&i| self.entries[i].terms.as_slice())
    }

    /// Groups of `attribute` in first-appearance order.
    pub fn groups(&self, attribute: Attribute) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.entries
            .iter()
            .filter(|e| e.key.attribute == attribute)
            .filter(|e| seen.insert(e.key.group.clone()))
            .map(|e| e.key.group.clone())
            .collect()
    }

    pub fn attribute_spec(&self, attribute: Attribute) -> AttributeSpec {
        AttributeSpec {
            attribute,
            groups: self.groups(attribute),
        }
    }
}

pub fn parse_lexicon_file(bytes: &[u8]) -> Result<Lexicon> {
    let raw: RawLexicon =
        serde_json::from_slice(bytes).map_err(|e| CorpusError::MalformedJson(e.to_string()))?;
    let mut lexicon = Lexicon::default();
    for e in raw.entries {
        let attribute = e
            .attribute
            .parse::<Attribute>()
            .map_err(|_| CorpusError::UnknownAttribute(e.attribute.clone()))?;
        lexicon.push(LexiconEntry {
            key: LexiconKey {
                attribute,
                group: e.group,
                language: e.language,
                gender: e.gender,
                role: e.role,
            },
            terms: e.terms,
        })?;
    }
    Ok(lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn race_lexicon_json() -> String {
        let groups = ["White", "Hispanic", "Black", "Asian", "African American"];
        let entries: Vec<_> = groups
            .iter()
            .flat_map(|g| {
                ["female", "male"].map(|gender| {
                    serde_json::json!({
                        "attribute": "race", "group": g, "language": "en",
                        "gender": gender, "role": "adj", "terms": [g]
                    })
                })
            })
            .collect();
        serde_json::json!({ "entries": entries }).to_string()
    }

    #[test]
    fn race_lexicon_has_ten_entries() {
        let lex = parse_lexicon_file(race_lexicon_json().as_bytes()).unwrap();
        assert_eq!(lex.len(), 10);
        assert_eq!(
            lex.groups(Attribute::Race),
            vec!["White", "Hispanic", "Black", "Asian", "African American"]
        );
        let key = LexiconKey {
            attribute: Attribute::Race,
            group: "Black".into(),
            language: "en".into(),
            gender: Gender::Male,
            role: Role::Adj,
        };
        assert_eq!(lex.terms(&key).unwrap(), ["Black"]);
    }

    #[test]
    fn empty_terms_rejected() {
        let json = r#"{"entries":[{"attribute":"race","group":"Black","language":"en","gender":"female","role":"adj","terms":[""]}]}"#;
        assert!(matches!(
            parse_lexicon_file(json.as_bytes()),
            Err(CorpusError::EmptyTermList(_))
        ));
        let json = r#"{"entries":[{"attribute":"race","group":"Black","language":"en","gender":"female","role":"adj","terms":[]}]}"#;
        assert!(matches!(
            parse_lexicon_file(json.as_bytes()),
            Err(CorpusError::EmptyTermList(_))
        ));
    }

    #[test]
    fn unknown_attribute_rejected() {
        let json = r#"{"entries":[{"attribute":"age","group":"old","language":"en","gender":"female","role":"adj","terms":["old"]}]}"#;
        assert_eq!(
            parse_lexicon_file(json.as_bytes()).unwrap_err(),
            CorpusError::UnknownAttribute("age".into())
        );
    }

    #[test]
    fn religion_lexicon_matches_published_groups() {
        let groups = ["Buddhism", "Christianity", "Judaism", "Islam", "atheism", "Hinduism"];
        let entries: Vec<_> = groups
            .iter()
            .map(|g| {
                serde_json::json!({
                    "attribute": "religion", "group": g, "language": "en",
                    "gender": "female", "role": "noun", "terms": [format!("a {g}")]
                })
            })
            .collect();
        let lex = parse_lexicon_file(serde_json::json!({ "entries": entries }).to_string().as_bytes())
            .unwrap();
        let mut from_file = lex.groups(Attribute::Religion);
        from_file.sort();
        assert_eq!(from_file, AttributeSpec::published(Attribute::Religion).groups);
    }

    #[test]
    fn published_group_counts() {
        assert_eq!(AttributeSpec::published(Attribute::Gender).len(), 2);
        assert_eq!(AttributeSpec::published(Attribute::Race).len(), 5);
        assert_eq!(AttributeSpec::published(Attribute::Religion).len(), 6);
        assert_eq!(AttributeSpec::published(Attribute::Nationality).len(), 17);
        assert!(AttributeSpec::new(Attribute::Race, vec!["a".into(), "a".into()]).is_err());
    }
}
