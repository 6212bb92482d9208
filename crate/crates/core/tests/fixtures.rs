use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use biasprobe::corpus::{
    expand, pair_genders, parse_lexicon_file, parse_template_file, validate_parallel, AttributeSpec,
    BiasSample, Finding, Lexicon, TemplateSet,
};
use biasprobe::metrics::group_template_score;
use biasprobe::scoring::{mock_score, read_scores};
use biasprobe::{Attribute, Gender};

const LANGUAGES: [&str; 5] = ["en", "es", "it", "zh", "he"];

fn languages() -> Vec<String> {
    LANGUAGES.map(String::from).to_vec()
}

fn load() -> (TemplateSet, Lexicon) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let templates = parse_template_file(&std::fs::read(dir.join("templates.json")).unwrap()).unwrap();
    let lexicon = parse_lexicon_file(&std::fs::read(dir.join("lexicon.json")).unwrap()).unwrap();
    (templates, lexicon)
}

fn only(samples: &[BiasSample], attribute: Attribute) -> Vec<BiasSample> {
    samples.iter().filter(|s| s.attribute == attribute).cloned().collect()
}

#[test]
fn template_counts() {
    let (t, _) = load();
    assert_eq!(t.count(Attribute::Gender), 27);
    assert_eq!(t.count(Attribute::Race), 27);
    assert_eq!(t.count(Attribute::Religion), 57);
    assert_eq!(t.count(Attribute::Nationality), 36);
}

#[test]
fn lexicon_groups_match_published_sets() {
    let (_, lex) = load();
    for attribute in [Attribute::Race, Attribute::Religion, Attribute::Nationality] {
        let mut groups = lex.groups(attribute);
        groups.sort();
        assert_eq!(groups, AttributeSpec::published(attribute).groups, "{attribute}");
    }
}

#[test]
fn per_language_cardinalities() {
    let (t, lex) = load();
    for language in LANGUAGES {
        let s = expand(&t, &lex, &[language.to_string()], &Attribute::ALL).unwrap();
        let count = |a| s.iter().filter(|x| x.attribute == a).count();
        assert_eq!(count(Attribute::Gender), 54);
        assert_eq!(count(Attribute::Race), 270);
        assert_eq!(count(Attribute::Religion), 684);
        assert_eq!(count(Attribute::Nationality), 1224);
        assert_eq!(s.len(), 2232);
        assert!(s.iter().all(|x| !x.text.contains('{') && !x.text.contains('}')));
    }
}

#[test]
fn every_sample_exists_in_every_language() {
    let (t, lex) = load();
    let s = expand(&t, &lex, &languages(), &Attribute::ALL).unwrap();
    let mut langs: BTreeMap<(String, Gender, String, usize), BTreeSet<String>> = BTreeMap::new();
    for x in &s {
        langs
            .entry((x.template_id.clone(), x.gender, x.group.clone(), x.identity_term_index))
            .or_default()
            .insert(x.language.clone());
    }
    let expected: BTreeSet<String> = languages().into_iter().collect();
    assert!(langs.values().all(|l| *l == expected));
}

#[test]
fn expansion_is_deterministic() {
    let (t, lex) = load();
    let a = expand(&t, &lex, &languages(), &Attribute::ALL).unwrap();
    let b = expand(&t, &lex, &languages(), &Attribute::ALL).unwrap();
    assert_eq!(a, b);
}

#[test]
fn religion_pairs_match_cross_join() {
    let (t, lex) = load();
    let s = only(&expand(&t, &lex, &["en".to_string()], &[Attribute::Religion]).unwrap(), Attribute::Religion);
    assert_eq!(s.len(), 684);
    let pairs = pair_genders(&s).unwrap();
    assert_eq!(pairs.len(), 342);

    let mut oracle = Vec::new();
    for f in s.iter().filter(|x| x.gender == Gender::Female) {
        for m in s.iter().filter(|x| x.gender == Gender::Male) {
            if f.template_id == m.template_id
                && f.language == m.language
                && f.group == m.group
                && f.identity_term_index == m.identity_term_index
            {
                oracle.push((f.sample_id.clone(), m.sample_id.clone()));
            }
        }
    }
    oracle.sort();
    assert_eq!(pairs, oracle);
    let by_id: BTreeMap<&str, &BiasSample> = s.iter().map(|x| (x.sample_id.as_str(), x)).collect();
    for (f, m) in &pairs {
        let (f, m) = (by_id[f.as_str()], by_id[m.as_str()]);
        assert_ne!(f.text, m.text);
        assert_eq!((f.gold_label, &f.group), (m.gold_label, &m.group));
    }
}

#[test]
fn complete_fixture_validates_clean() {
    let (t, _) = load();
    let report = validate_parallel(&t, &languages());
    assert!(report.is_clean(), "{:?}", report.findings);
    assert_eq!(report.checked_variants, 147 * 10);

    // a 63-template slice: 63 x 5 languages x 2 genders
    let slice = TemplateSet {
        templates: t.templates[..63].to_vec(),
    };
    let report = validate_parallel(&slice, &languages());
    assert_eq!((report.checked_variants, report.findings.len()), (630, 0));
}

#[test]
fn missing_hebrew_male_variant_is_one_finding() {
    let (mut t, _) = load();
    let target = t.templates[0].template_id.clone();
    t.templates[0]
        .variants
        .retain(|v| !(v.language == "he" && v.gender == Gender::Male));
    let report = validate_parallel(&t, &languages());
    assert_eq!(report.findings.len(), 1);
    match &report.findings[0] {
        Finding::MissingVariant {
            template_id,
            language,
            gender,
        } => {
            assert_eq!(template_id, &target);
            assert_eq!(language, "he");
            assert_eq!(*gender, Gender::Male);
        }
        other => panic!("unexpected finding {other:?}"),
    }
}

#[test]
fn nationality_score_file_covers_expansion() {
    let (t, lex) = load();
    let s = expand(&t, &lex, &["en".to_string()], &[Attribute::Nationality]).unwrap();
    let jsonl = mock_score(&s, 3).to_jsonl();
    assert_eq!(jsonl.lines().count(), 1224);
    let table = read_scores(jsonl.as_bytes()).unwrap();
    assert_eq!(table.len(), 1224);
    let ids: BTreeSet<&str> = table.ids().collect();
    assert_eq!(ids, s.iter().map(|x| x.sample_id.as_str()).collect());
}

#[test]
fn race_matrix_matches_brute_force_means() {
    let (t, lex) = load();
    let s = expand(&t, &lex, &["es".to_string()], &[Attribute::Race]).unwrap();
    let scores = mock_score(&s, 11);
    let m = group_template_score(&s, &scores, Attribute::Race, "es", Gender::Male).unwrap();
    assert_eq!((m.n_groups(), m.n_templates()), (5, 27));
    for (i, g) in m.groups().iter().enumerate() {
        for (j, tid) in m.templates().iter().enumerate() {
            let cell: Vec<f64> = s
                .iter()
                .filter(|x| &x.group == g && &x.template_id == tid && x.gender == Gender::Male)
                .map(|x| scores.p_positive(&x.sample_id).unwrap())
                .collect();
            assert!(!cell.is_empty());
            let mean = cell.iter().sum::<f64>() / cell.len() as f64;
            assert_eq!(m.get(i, j), mean);
        }
    }
}
