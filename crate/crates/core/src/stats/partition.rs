use serde::{Deserialize, Serialize};

use super::{Result, StatsError};

/// Symmetric language x language matrix of pairwise p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueMatrix {
    pub languages: Vec<String>,
    pub p: Vec<Vec<f64>>,
}

impl PValueMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.languages.iter().position(|l| l == a)?;
        let j = self.languages.iter().position(|l| l == b)?;
        Some(self.p[i][j])
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = i;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Connected components of the graph joining languages whose pairwise p-value
/// is at least `alpha`. The relation is not transitive: a and b may land in one
/// component even when their own p-value is below `alpha`.
pub fn partition_languages(matrix: &PValueMatrix, alpha: f64) -> Result<Vec<Vec<String>>> {
    let n = matrix.languages.len();
    if matrix.p.len() != n || matrix.p.iter().any(|row| row.len() != n) {
        return Err(StatsError::InvalidInput(format!("p-value matrix must be {n} x {n}")));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (matrix.p[i][j], matrix.p[j][i]);
            if a.is_nan() || b.is_nan() || (a - b).abs() > 1e-12 {
                return Err(StatsError::AsymmetricMatrix(
                    matrix.languages[i].clone(),
                    matrix.languages[j].clone(),
                ));
            }
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix.p[i][j] >= alpha {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut components: Vec<Vec<String>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let idx = *slot[root].get_or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[idx].push(matrix.languages[i].clone());
    }
    for c in &mut components {
        c.sort();
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    Ok(components)
}
