use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ranks::{doubled_mid_ranks, tie_term};
use super::{check_finite, Result, StatsError, TestMethod, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FriedmanMethod {
    /// Chi-square with k - 1 degrees of freedom.
    ChiSquare,
    /// Exact within-block permutation distribution of the rank sums.
    Exact,
    /// Exact when the estimated work fits `exact_budget`, chi-square otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanOptions {
    pub method: FriedmanMethod,
    pub exact_budget: f64,
}

impl Default for FriedmanOptions {
    fn default() -> Self {
        Self {
            method: FriedmanMethod::ChiSquare,
            exact_budget: 5e7,
        }
    }
}

/// `rows` are blocks, columns are treatments.
pub fn friedman(rows: &[Vec<f64>]) -> Result<TestResult> {
    friedman_with(rows, &FriedmanOptions::default())
}

pub fn friedman_with(rows: &[Vec<f64>], options: &FriedmanOptions) -> Result<TestResult> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != k) {
        return Err(StatsError::LengthMismatch {
            left: k,
            right: bad.len(),
        });
    }
    if k < 3 {
        return Err(StatsError::TooFewTreatments(k));
    }
    if n < 2 {
        return Err(StatsError::TooFewBlocks(n));
    }
    for row in rows {
        check_finite(row, "block")?;
    }

    let ranked: Vec<(Vec<u64>, Vec<usize>)> = rows.iter().map(|r| doubled_mid_ranks(r)).collect();
    let mut doubled_sums = vec![0u64; k];
    let mut ties = 0.0;
    for (ranks, groups) in &ranked {
        for (sum, r) in doubled_sums.iter_mut().zip(ranks) {
            *sum += r;
        }
        ties += tie_term(groups);
    }

    let (nf, kf) = (n as f64, k as f64);
    let correction = 1.0 - ties / (nf * (kf.powi(3) - kf));
    if correction <= 0.0 {
        return Ok(TestResult::new(TestMethod::Friedman, 0.0, 1.0, n, false));
    }
    let sum_sq: f64 = doubled_sums.iter().map(|&s| (s as f64 / 2.0).powi(2)).sum();
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * sum_sq - 3.0 * nf * (kf + 1.0);
    let statistic = (raw / correction).max(0.0);

    let use_exact = match options.method {
        FriedmanMethod::ChiSquare => false,
        FriedmanMethod::Exact => true,
        FriedmanMethod::Auto => exact_work(n, k) <= options.exact_budget,
    };
    let p = if use_exact {
        exact_p(&ranked, &doubled_sums)
    } else {
        ChiSquared::new(kf - 1.0).expect("k >= 3").sf(statistic)
    };
    Ok(TestResult::new(TestMethod::Friedman, statistic, p, n, use_exact))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Rough operation count of the exact convolution.
fn exact_work(n: usize, k: usize) -> f64 {
    let states = ((n * (k - 1) + 1) as f64).powi(k as i32 - 1);
    states * factorial(k) * n as f64
}

fn permutations(items: &[u64]) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    let mut current = items.to_vec();
    heap_permute(current.len(), &mut current, &mut out);
    out
}

fn heap_permute(len: usize, items: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>) {
    if len <= 1 {
        out.insert(items.clone());
        return;
    }
    for i in 0..len - 1 {
        heap_permute(len - 1, items, out);
        if len.is_multiple_of(2) {
            items.swap(i, len - 1);
        } else {
            items.swap(0, len - 1);
        }
    }
    heap_permute(len - 1, items, out);
}

/// P(sum of squared rank sums >= observed) when every block's ranks are
/// permuted uniformly and independently. Each block contributes the distinct
/// arrangements of its own mid-rank vector, so ties are handled exactly.
fn exact_p(ranked: &[(Vec<u64>, Vec<usize>)], observed: &[u64]) -> f64 {
    let k = observed.len();
    let mut dist: HashMap<Vec<u64>, f64> = HashMap::from([(vec![0u64; k], 1.0)]);
    for (ranks, _) in ranked {
        let arrangements: Vec<Vec<u64>> = permutations(ranks).into_iter().collect();
        let weight = 1.0 / arrangements.len() as f64;
        let mut next: HashMap<Vec<u64>, f64> = HashMap::with_capacity(dist.len() * 4);
        for (state, mass) in &dist {
            for arrangement in &arrangements {
                let key: Vec<u64> = state.iter().zip(arrangement).map(|(a, b)| a + b).collect();
                *next.entry(key).or_insert(0.0) += mass * weight;
            }
        }
        dist = next;
    }
    let target: u64 = observed.iter().map(|s| s * s).sum();
    let p: f64 = dist
        .iter()
        .filter(|(state, _)| state.iter().map(|s| s * s).sum::<u64>() >= target)
        .map(|(_, mass)| mass)
        .sum();
    p.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ordering_two_blocks() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]];
        let r = friedman(&rows).unwrap();
        assert_eq!(r.statistic, 4.0);
        assert!((r.p_value - (-2.0f64).exp()).abs() < 1e-12);
        assert!(!r.exact);
        assert_eq!(r.n_effective, 2);
    }

    #[test]
    fn exact_distribution_of_two_blocks() {
        // ranks agree in 6 of the 36 equally likely arrangements
        let rows = vec![vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]];
        let opts = FriedmanOptions {
            method: FriedmanMethod::Exact,
            ..Default::default()
        };
        let r = friedman_with(&rows, &opts).unwrap();
        assert!(r.exact);
        assert!((r.p_value - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn fully_tied_blocks() {
        let rows = vec![vec![0.5; 4]; 6];
        let r = friedman(&rows).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn tie_correction_matches_hand_value() {
        // ranks (1.5,1.5,3), (1,2,3): R = (2.5, 3.5, 6), sum sq = 54.5
        // raw = 12/24 * 54.5 - 24 = 3.25; C = 1 - 6/(2*24) = 0.875
        let rows = vec![vec![1.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]];
        let r = friedman(&rows).unwrap();
        assert!((r.statistic - 3.25 / 0.875).abs() < 1e-12);
    }

    #[test]
    fn rank_based_invariance() {
        let rows = vec![
            vec![0.1, 0.5, 0.3, 0.9],
            vec![0.2, 0.1, 0.4, 0.3],
            vec![0.7, 0.6, 0.2, 0.8],
        ];
        let squashed: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| (3.0_f64 * x).exp() + 1.0).collect())
            .collect();
        assert_eq!(friedman(&rows).unwrap(), friedman(&squashed).unwrap());
    }

    #[test]
    fn shape_errors() {
        assert_eq!(
            friedman(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap_err(),
            StatsError::TooFewTreatments(2)
        );
        assert_eq!(
            friedman(&[vec![1.0, 2.0, 3.0]]).unwrap_err(),
            StatsError::TooFewBlocks(1)
        );
        assert!(friedman(&[vec![1.0, 2.0, 3.0], vec![1.0]]).is_err());
    }

    #[test]
    fn auto_respects_budget() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]];
        let small = FriedmanOptions {
            method: FriedmanMethod::Auto,
            exact_budget: 1e9,
        };
        assert!(friedman_with(&rows, &small).unwrap().exact);
        let tiny = FriedmanOptions {
            method: FriedmanMethod::Auto,
            exact_budget: 1.0,
        };
        assert!(!friedman_with(&rows, &tiny).unwrap().exact);
    }
}
