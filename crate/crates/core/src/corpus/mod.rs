//! Bias-probing corpus: template and lexicon files, expansion into parallel
//! samples, and dataset-shaping utilities.
//!
//! Templates carry `{identity:adj}` / `{identity:noun}` slots and exist once
//! per language and subject gender. The lexicon supplies the gendered surface
//! form of every group in every language. [`expand`] crosses the two into
//! [`BiasSample`]s whose ids are the colon-joined tuple
//! `attribute:template_id:language:gender:group:term_index`.

mod dataset;
mod expand;
mod frequency;
mod lexicon;
mod template;

pub use dataset::{
    balance_labels, downsample_equal, parse_labeled_dataset, LabelCounts, LabeledDataset,
    LabeledRecord,
};
pub use expand::{expand, make_sample_id, pair_genders, parse_sample_id, BiasSample, SampleKey};
pub use frequency::{parse_corpus_counts, rank_groups_by_frequency, CorpusCounts, GroupRanking};
pub use lexicon::{parse_lexicon_file, AttributeSpec, Lexicon, LexiconEntry, LexiconKey};
pub use template::{
    parse_template_document, parse_template_file, placeholder_roles, validate_parallel, Finding,
    Role, Template, TemplateSet, ValidationReport, Variant,
};

use crate::domain::{Gender, SentimentLabel};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CorpusError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("duplicate template id `{0}`")]
    DuplicateTemplateId(String),
    #[error("template `{template_id}` has no {gender} variant for language `{language}`")]
    MissingLanguageVariant {
        template_id: String,
        language: String,
        gender: Gender,
    },
    #[error("template `{template_id}` has more than one {gender} variant for language `{language}`")]
    DuplicateVariant {
        template_id: String,
        language: String,
        gender: Gender,
    },
    #[error("template `{template_id}`: {detail}")]
    PlaceholderMismatch { template_id: String, detail: String },
    #[error("template `{template_id}`: unknown placeholder `{placeholder}`")]
    UnknownPlaceholderRole {
        template_id: String,
        placeholder: String,
    },
    #[error("lexicon entry {0} has an empty term list or an empty term")]
    EmptyTermList(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("lexicon entry {0} appears more than once")]
    DuplicateLexiconEntry(String),
    #[error("lexicon has no entry for {0}")]
    MissingLexiconEntry(String),
    #[error("template `{template_id}`: roles map to different term counts for {key}")]
    TermCountMismatch { template_id: String, key: String },
    #[error("sample `{0}` has no counterpart of the other gender")]
    UnpairedSample(String),
    #[error("sample `{0}` belongs to the gender attribute and cannot be gender-paired")]
    GenderNotPairable(String),
    #[error("{component} `{value}` contains an illegal character (`:`) or is empty")]
    IllegalCharacter {
        component: &'static str,
        value: String,
    },
    #[error("malformed sample id `{0}`")]
    MalformedSampleId(String),
    #[error("duplicate record id `{0}`")]
    DuplicateRecordId(String),
    #[error("record `{0}` is labelled neutral; balancing needs positive/negative labels only")]
    NeutralLabelPresent(String),
    #[error("language `{language}` has no {label} records")]
    EmptyLabelClass {
        language: String,
        label: SentimentLabel,
    },
    #[error("no datasets given")]
    NoDatasets,
}

pub type Result<T> = std::result::Result<T, CorpusError>;
