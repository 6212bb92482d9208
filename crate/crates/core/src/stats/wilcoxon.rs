use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ranks::{doubled_mid_ranks, tie_term};
use super::{check_finite, Result, StatsError, TestMethod, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOptions {
    /// Exact enumeration when the number of nonzero differences is at most this.
    pub exact_max_n: usize,
}

impl Default for WilcoxonOptions {
    fn default() -> Self {
        Self { exact_max_n: 20 }
    }
}

/// Rank sums of the positive and negative differences `x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedRankSums {
    pub w_plus: f64,
    pub w_minus: f64,
}

impl SignedRankSums {
    pub fn signed(&self) -> f64 {
        self.w_plus - self.w_minus
    }
}

struct Ranked {
    doubled: Vec<u64>,
    positive: Vec<bool>,
    ties: Vec<usize>,
}

fn rank_differences(x: &[f64], y: &[f64]) -> Result<Ranked> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (doubled, ties) = doubled_mid_ranks(&magnitudes);
    Ok(Ranked {
        doubled,
        positive: diffs.iter().map(|d| *d > 0.0).collect(),
        ties,
    })
}

pub fn wilcoxon_signs(x: &[f64], y: &[f64]) -> Result<SignedRankSums> {
    let r = rank_differences(x, y)?;
    let mut plus = 0u64;
    let mut minus = 0u64;
    for (rank, pos) in r.doubled.iter().zip(&r.positive) {
        if *pos {
            plus += rank;
        } else {
            minus += rank;
        }
    }
    Ok(SignedRankSums {
        w_plus: plus as f64 / 2.0,
        w_minus: minus as f64 / 2.0,
    })
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult> {
    wilcoxon_signed_rank_with(x, y, &WilcoxonOptions::default())
}

/// Statistic W = min(W+, W-) over nonzero differences.
pub fn wilcoxon_signed_rank_with(x: &[f64], y: &[f64], options: &WilcoxonOptions) -> Result<TestResult> {
    let r = rank_differences(x, y)?;
    let n = r.doubled.len();
    if n == 0 {
        return Ok(TestResult::new(TestMethod::Wilcoxon, 0.0, 1.0, 0, true));
    }
    let plus: u64 = r
        .doubled
        .iter()
        .zip(&r.positive)
        .filter(|(_, pos)| **pos)
        .map(|(rank, _)| rank)
        .sum();
    let total: u64 = r.doubled.iter().sum();
    let w_doubled = plus.min(total - plus);
    let w = w_doubled as f64 / 2.0;

    if n <= options.exact_max_n {
        let p = 2.0 * lower_tail(&r.doubled, w_doubled);
        return Ok(TestResult::new(TestMethod::Wilcoxon, w, p.min(1.0), n, true));
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&r.ties) / 48.0;
    if var <= 0.0 {
        return Ok(TestResult::new(TestMethod::Wilcoxon, w, 1.0, n, false));
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let p = 2.0 * Normal::new(0.0, 1.0).expect("standard normal").sf(z);
    Ok(TestResult::new(TestMethod::Wilcoxon, w, p.min(1.0), n, false))
}

/// P(W+ <= w) under independent fair signs, by counting subsets of the
/// doubled ranks.
fn lower_tail(doubled: &[u64], w: u64) -> f64 {
    let total: u64 = doubled.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let hits: f64 = counts[..=w as usize].iter().sum();
    hits / 2f64.powi(doubled.len() as i32)
}

/// Wilcoxon signed-rank test over paired (female, male) probabilities.
pub fn gender_gap_test(female: &[f64], male: &[f64]) -> Result<TestResult> {
    wilcoxon_signed_rank(female, male)
}
