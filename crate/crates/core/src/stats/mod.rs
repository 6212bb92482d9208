//! Nonparametric significance tests and language-set partitioning.
//!
//! Every p-value lies in [0, 1]. Degenerate inputs with no information
//! (no discordant pairs, all-zero differences, fully tied blocks) yield p = 1.

mod friedman;
mod mcnemar;
mod partition;
mod ranks;
mod wilcoxon;

pub use friedman::{friedman, friedman_with, FriedmanMethod, FriedmanOptions};
pub use mcnemar::{mcnemar, mcnemar_counts, mcnemar_with, McNemarOptions, PairedPredictions};
pub use partition::{partition_languages, PValueMatrix};
pub use wilcoxon::{
    gender_gap_test, wilcoxon_signed_rank, wilcoxon_signed_rank_with, wilcoxon_signs,
    SignedRankSums, WilcoxonOptions,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Mcnemar,
    Friedman,
    Wilcoxon,
}

impl TestMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mcnemar => "mcnemar",
            Self::Friedman => "friedman",
            Self::Wilcoxon => "wilcoxon",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub exact: bool,
}

impl TestResult {
    fn new(method: TestMethod, statistic: f64, p_value: f64, n_effective: usize, exact: bool) -> Self {
        Self {
            method,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            n_effective,
            exact,
        }
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("friedman needs at least 3 treatments, got {0}")]
    TooFewTreatments(usize),
    #[error("friedman needs at least 2 blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("p-value matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(String, String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, StatsError>;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::InvalidInput(format!("{what} contains a non-finite value")));
    }
    Ok(())
}
