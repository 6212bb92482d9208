use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CorpusError, Lexicon, Result};
use crate::domain::Attribute;

/// Token frequencies gathered from one language's reference corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub language: String,
    pub counts: BTreeMap<String, u64>,
}

pub fn parse_corpus_counts(bytes: &[u8]) -> Result<CorpusCounts> {
    serde_json::from_slice(bytes).map_err(|e| CorpusError::MalformedJson(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRanking {
    pub per_language: BTreeMap<String, Vec<String>>,
    /// Groups in the top `k` of every language, sorted by name.
    pub overlap: Vec<String>,
}

/// Ranks the lexicon's groups of `attribute` by total identity-term frequency
/// per language (ties broken by group name) and intersects the top-`k` lists.
///
/// Terms are matched case-insensitively; a term missing from the counts
/// contributes zero. Terms shared across genders or roles count once.
pub fn rank_groups_by_frequency(
    corpora: &[CorpusCounts],
    lexicon: &Lexicon,
    attribute: Attribute,
    k: usize,
) -> GroupRanking {
    let groups = lexicon.groups(attribute);
    let mut per_language = BTreeMap::new();

    for corpus in corpora {
        let lowered: BTreeMap<String, u64> = corpus.counts.iter().fold(
            BTreeMap::new(),
            |mut acc, (token, count)| {
                *acc.entry(token.to_lowercase()).or_insert(0) += count;
                acc
            },
        );
        let mut totals: Vec<(u64, &String)> = groups
            .iter()
            .map(|group| {
                let terms: BTreeSet<String> = lexicon
                    .entries()
                    .iter()
                    .filter(|e| {
                        e.key.attribute == attribute
                            && &e.key.group == group
                            && e.key.language == corpus.language
                    })
                    .flat_map(|e| e.terms.iter().map(|t| t.to_lowercase()))
                    .collect();
                let total = terms
                    .iter()
                    .map(|t| lowered.get(t).copied().unwrap_or(0))
                    .sum();
                (total, group)
            })
            .collect();
        totals.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        per_language.insert(
            corpus.language.clone(),
            totals.into_iter().map(|(_, g)| g.clone()).collect::<Vec<_>>(),
        );
    }

    let mut overlap: Option<BTreeSet<String>> = None;
    for ranked in per_language.values() {
        let top: BTreeSet<String> = ranked.iter().take(k).cloned().collect();
        overlap = Some(match overlap {
            None => top,
            Some(acc) => acc.intersection(&top).cloned().collect(),
        });
    }

    GroupRanking {
        per_language,
        overlap: overlap.unwrap_or_default().into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LexiconEntry, LexiconKey, Role};
    use crate::domain::Gender;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lexicon(groups: &[(&str, &str)], languages: &[&str]) -> Lexicon {
        let mut entries = Vec::new();
        for (group, term) in groups {
            for lang in languages {
                for gender in Gender::BOTH {
                    entries.push(LexiconEntry {
                        key: LexiconKey {
                            attribute: Attribute::Religion,
                            group: group.to_string(),
                            language: lang.to_string(),
                            gender,
                            role: Role::Adj,
                        },
                        terms: vec![format!("{term}-{lang}")],
                    });
                }
            }
        }
        Lexicon::from_entries(entries).unwrap()
    }

    #[test]
    fn ranks_by_count_descending() {
        let lex = Lexicon::from_entries(
            [("Buddhism", "Buddhist"), ("Christianity", "Christian")]
                .iter()
                .map(|(g, t)| LexiconEntry {
                    key: LexiconKey {
                        attribute: Attribute::Religion,
                        group: g.to_string(),
                        language: "en".into(),
                        gender: Gender::Female,
                        role: Role::Adj,
                    },
                    terms: vec![t.to_string()],
                })
                .collect(),
        )
        .unwrap();
        let counts = CorpusCounts {
            language: "en".into(),
            counts: [("buddhist".to_string(), 5), ("christian".to_string(), 9)]
                .into_iter()
                .collect(),
        };
        let r = rank_groups_by_frequency(&[counts], &lex, Attribute::Religion, 1);
        assert_eq!(r.per_language["en"], vec!["Christianity", "Buddhism"]);
        assert_eq!(r.overlap, vec!["Christianity"]);
    }

    #[test]
    fn zero_counts_fall_back_to_names() {
        let lex = lexicon(&[("Islam", "i"), ("Buddhism", "b"), ("Judaism", "j")], &["en", "he"]);
        let corpora: Vec<_> = ["en", "he"]
            .iter()
            .map(|l| CorpusCounts {
                language: l.to_string(),
                counts: BTreeMap::new(),
            })
            .collect();
        let r = rank_groups_by_frequency(&corpora, &lex, Attribute::Religion, 2);
        assert_eq!(r.per_language["he"], vec!["Buddhism", "Islam", "Judaism"]);
        assert_eq!(r.overlap, vec!["Buddhism", "Islam"]);
    }

    #[test]
    fn overlap_matches_brute_force_intersection() {
        let groups: Vec<(String, String)> = (0..8).map(|i| (format!("G{i}"), format!("t{i}"))).collect();
        let group_refs: Vec<(&str, &str)> = groups.iter().map(|(g, t)| (g.as_str(), t.as_str())).collect();
        let langs = ["aa", "bb", "cc"];
        let lex = lexicon(&group_refs, &langs);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let corpora: Vec<CorpusCounts> = langs
                .iter()
                .map(|l| CorpusCounts {
                    language: l.to_string(),
                    counts: groups
                        .iter()
                        .map(|(_, t)| (format!("{t}-{l}"), rng.random_range(0..6u64)))
                        .collect(),
                })
                .collect();
            let r = rank_groups_by_frequency(&corpora, &lex, Attribute::Religion, 2);

            // Oracle: recompute each top-2 by exhaustive comparison, then intersect.
            let mut tops: Vec<BTreeSet<String>> = Vec::new();
            for c in &corpora {
                let score = |g: &(String, String)| c.counts[&format!("{}-{}", g.1, c.language)];
                let mut top = BTreeSet::new();
                for g in &groups {
                    let better = groups
                        .iter()
                        .filter(|h| score(h) > score(g) || (score(h) == score(g) && h.0 < g.0))
                        .count();
                    if better < 2 {
                        top.insert(g.0.clone());
                    }
                }
                tops.push(top);
            }
            let expected: Vec<String> = tops[0]
                .iter()
                .filter(|g| tops.iter().all(|t| t.contains(*g)))
                .cloned()
                .collect();
            assert_eq!(r.overlap, expected);
            for ranked in r.per_language.values() {
                let mut p = ranked.clone();
                p.sort();
                let mut all: Vec<String> = groups.iter().map(|g| g.0.clone()).collect();
                all.sort();
                assert_eq!(p, all);
            }
        }
    }
}
