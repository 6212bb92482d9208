//! Independent reference implementations used by integration and acceptance
//! tests. Nothing here calls into the library's statistics code.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mid-ranks (1-based) by counting, O(k^2).
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|o| *o < v).count() as f64;
            let equal = values.iter().filter(|o| *o == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Sum over treatments of squared rank sums; monotone in the Friedman
/// statistic for fixed blocks.
pub fn rank_sum_squares(rows: &[Vec<f64>]) -> f64 {
    let k = rows[0].len();
    let mut sums = vec![0.0; k];
    for row in rows {
        for (s, r) in sums.iter_mut().zip(mid_ranks(row)) {
            *s += r;
        }
    }
    sums.iter().map(|s| s * s).sum()
}

/// Monte Carlo p-value: each draw shuffles every block independently.
pub fn friedman_permutation_p(rows: &[Vec<f64>], draws: usize, seed: u64) -> f64 {
    let observed = rank_sum_squares(rows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut work = rows.to_vec();
    let mut hits = 0usize;
    for _ in 0..draws {
        for row in work.iter_mut() {
            row.shuffle(&mut rng);
        }
        if rank_sum_squares(&work) >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random::<f64>()).collect())
        .collect()
}

fn signed_rank_min(d: &[f64]) -> (f64, f64, Vec<f64>) {
    let nz: Vec<f64> = d.iter().copied().filter(|x| *x != 0.0).collect();
    let ranks = mid_ranks(&nz.iter().map(|x| x.abs()).collect::<Vec<_>>());
    let plus: f64 = ranks.iter().zip(&nz).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let total: f64 = ranks.iter().sum();
    (plus.min(total - plus), total, ranks)
}

/// Exact two-sided signed-rank p by enumerating all 2^n sign assignments.
pub fn wilcoxon_enumeration_p(d: &[f64]) -> f64 {
    let (w, total, ranks) = signed_rank_min(d);
    let n = ranks.len();
    if n == 0 {
        return 1.0;
    }
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s.min(total - s) <= w + 1e-9 {
            extreme += 1;
        }
    }
    (extreme as f64 / (1u64 << n) as f64).min(1.0)
}

/// Monte Carlo sign-flip p-value for larger n.
pub fn wilcoxon_sign_flip_p(d: &[f64], draws: usize, seed: u64) -> f64 {
    let (w, total, ranks) = signed_rank_min(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        let s: f64 = ranks.iter().filter(|_| rng.random::<bool>()).sum();
        if s.min(total - s) <= w + 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

/// Two-sided exact binomial tail with integer Pascal rows.
pub fn mcnemar_binomial_p(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
    }
    let tail: u128 = row[b.max(c) as usize..].iter().sum();
    (2.0 * tail as f64 / 2f64.powi(n as i32)).min(1.0)
}

/// Connected components by repeated flood fill over edges with p >= alpha.
pub fn components(languages: &[String], p: &[Vec<f64>], alpha: f64) -> Vec<Vec<String>> {
    let n = languages.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(languages[i].clone());
            for j in 0..n {
                if !seen[j] && i != j && p[i][j] >= alpha {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}
