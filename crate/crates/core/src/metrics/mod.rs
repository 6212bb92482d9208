//! Group-comparison bias metrics over a groups x templates score matrix.
//!
//! With P(i, j) the mean positive probability of group i on template j:
//!
//! * `mcm`  = mean over templates of the population std across groups
//! * `vbcm` = per group, mean over templates of P(i, j) minus the all-groups mean
//! * `v`    = per group, mean over templates of P(i, j)
//! * `mbcm` = per non-majority group, mean over templates of P(i, j) - P(majority, j)
//!
//! Sums run template-major in ascending index order so results do not
//! depend on evaluation order.

mod matrix;
mod measures;
mod report;

pub use matrix::{group_template_score, ScoreMatrix};
pub use measures::{background_comparison, mbcm, mcm, v, vbcm, BackgroundSpec};
pub use report::{
    average_reports, majority_religion, mcm_delta, MajorityBackgrounds, McmDelta, MetricReport,
};

use crate::domain::{Attribute, Gender};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("metric needs at least two groups")]
    SingleGroup,
    #[error("majority group `{0}` is not among the matrix groups")]
    UnknownMajorityGroup(String),
    #[error("no majority group configured for language `{0}`")]
    UnknownLanguage(String),
    #[error("reports describe different cells: {0}")]
    MismatchedMetadata(String),
    #[error("no score for {} samples (first: {})", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    MissingScore(Vec<String>),
    #[error("no samples for group `{group}` on template `{template_id}`")]
    EmptyCell { group: String, template_id: String },
    #[error("no samples for {attribute}/{language}/{gender}")]
    NoSamples {
        attribute: Attribute,
        language: String,
        gender: Gender,
    },
    #[error("invalid score matrix: {0}")]
    InvalidMatrix(String),
    #[error("report for {0} has no MCM value")]
    MissingMcm(String),
}

pub type Result<T> = std::result::Result<T, MetricError>;
