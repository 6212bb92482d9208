use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_binomial;

use super::{Result, StatsError, TestMethod, TestResult};
use crate::domain::SentimentLabel;

/// Two classifiers' predictions on the same samples, aligned by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedPredictions {
    pub sample_ids: Vec<String>,
    pub gold: Vec<SentimentLabel>,
    pub predictions_a: Vec<SentimentLabel>,
    pub predictions_b: Vec<SentimentLabel>,
}

impl PairedPredictions {
    pub fn new(
        sample_ids: Vec<String>,
        gold: Vec<SentimentLabel>,
        predictions_a: Vec<SentimentLabel>,
        predictions_b: Vec<SentimentLabel>,
    ) -> Result<Self> {
        for other in [gold.len(), predictions_a.len(), predictions_b.len()] {
            if other != sample_ids.len() {
                return Err(StatsError::LengthMismatch {
                    left: sample_ids.len(),
                    right: other,
                });
            }
        }
        Ok(Self {
            sample_ids,
            gold,
            predictions_a,
            predictions_b,
        })
    }

    /// (b, c): a right and b wrong, a wrong and b right.
    pub fn discordant(&self) -> (u64, u64) {
        let mut b = 0;
        let mut c = 0;
        for ((g, pa), pb) in self.gold.iter().zip(&self.predictions_a).zip(&self.predictions_b) {
            match (pa == g, pb == g) {
                (true, false) => b += 1,
                (false, true) => c += 1,
                _ => {}
            }
        }
        (b, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarOptions {
    /// Exact binomial test when b + c is below this.
    pub exact_below: u64,
}

impl Default for McNemarOptions {
    fn default() -> Self {
        Self { exact_below: 25 }
    }
}

pub fn mcnemar(pairs: &PairedPredictions) -> TestResult {
    mcnemar_with(pairs, &McNemarOptions::default())
}

pub fn mcnemar_with(pairs: &PairedPredictions, options: &McNemarOptions) -> TestResult {
    let (b, c) = pairs.discordant();
    mcnemar_counts(b, c, options)
}

/// Exact branch: statistic = min(b, c), two-sided binomial tail.
/// Asymptotic branch: (|b - c| - 1)^2 / (b + c) against chi-square df 1.
pub fn mcnemar_counts(b: u64, c: u64, options: &McNemarOptions) -> TestResult {
    let n = b + c;
    if n == 0 {
        return TestResult::new(TestMethod::Mcnemar, 0.0, 1.0, 0, true);
    }
    if n < options.exact_below {
        let hi = b.max(c);
        let tail: f64 = (hi..=n)
            .map(|k| (ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2).exp())
            .sum();
        TestResult::new(TestMethod::Mcnemar, b.min(c) as f64, (2.0 * tail).min(1.0), n as usize, true)
    } else {
        let diff = (b as f64 - c as f64).abs() - 1.0;
        let statistic = diff * diff / n as f64;
        let p = ChiSquared::new(1.0).expect("df 1").sf(statistic);
        TestResult::new(TestMethod::Mcnemar, statistic, p, n as usize, false)
    }
}
