use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MetricError, Result, ScoreMatrix};

/// Reference score a group is compared against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "majority_group", rename_all = "snake_case")]
pub enum BackgroundSpec {
    /// Mean over all groups, the compared group included.
    AllGroupsMean,
    /// A designated group; it is left out of the output.
    MajorityGroup(String),
}

fn require_groups(m: &ScoreMatrix) -> Result<()> {
    if m.n_groups() < 2 {
        return Err(MetricError::SingleGroup);
    }
    Ok(())
}

/// Mean over templates of the population standard deviation across groups.
pub fn mcm(m: &ScoreMatrix) -> Result<f64> {
    require_groups(m)?;
    let groups = m.n_groups() as f64;
    let mut total = 0.0;
    for j in 0..m.n_templates() {
        let mean = m.values().iter().map(|row| row[j]).sum::<f64>() / groups;
        let var = m
            .values()
            .iter()
            .map(|row| (row[j] - mean).powi(2))
            .sum::<f64>()
            / groups;
        total += var.sqrt();
    }
    Ok(total / m.n_templates() as f64)
}

/// Per-group mean deviation from `background`, keyed by group name.
pub fn background_comparison(
    m: &ScoreMatrix,
    background: &BackgroundSpec,
) -> Result<BTreeMap<String, f64>> {
    require_groups(m)?;
    let n = m.n_templates();
    let reference: Vec<f64> = match background {
        BackgroundSpec::AllGroupsMean => (0..n)
            .map(|j| m.values().iter().map(|row| row[j]).sum::<f64>() / m.n_groups() as f64)
            .collect(),
        BackgroundSpec::MajorityGroup(name) => {
            let k = m
                .group_index(name)
                .ok_or_else(|| MetricError::UnknownMajorityGroup(name.clone()))?;
            m.values()[k].clone()
        }
    };
    let skip = match background {
        BackgroundSpec::MajorityGroup(name) => Some(name.as_str()),
        BackgroundSpec::AllGroupsMean => None,
    };
    Ok(m
        .groups()
        .iter()
        .zip(m.values())
        .filter(|(g, _)| Some(g.as_str()) != skip)
        .map(|(g, row)| {
            let sum: f64 = row.iter().zip(&reference).map(|(p, b)| p - b).sum();
            (g.clone(), sum / n as f64)
        })
        .collect())
}

pub fn vbcm(m: &ScoreMatrix) -> Result<BTreeMap<String, f64>> {
    background_comparison(m, &BackgroundSpec::AllGroupsMean)
}

pub fn mbcm(m: &ScoreMatrix, majority_group: &str) -> Result<BTreeMap<String, f64>> {
    if m.group_index(majority_group).is_none() {
        return Err(MetricError::UnknownMajorityGroup(majority_group.to_string()));
    }
    background_comparison(m, &BackgroundSpec::MajorityGroup(majority_group.to_string()))
}

/// Mean score of each group across templates.
pub fn v(m: &ScoreMatrix) -> BTreeMap<String, f64> {
    let n = m.n_templates() as f64;
    m.groups()
        .iter()
        .zip(m.values())
        .map(|(g, row)| (g.clone(), row.iter().sum::<f64>() / n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn constant_matrix_has_no_spread() {
        let m = ScoreMatrix::from_rows(vec![vec![0.7; 4]; 3]).unwrap();
        assert!(close(mcm(&m).unwrap(), 0.0));
        assert!(vbcm(&m).unwrap().values().all(|x| close(*x, 0.0)));
        assert!(v(&m).values().all(|x| close(*x, 0.7)));
    }

    #[test]
    fn two_point_column() {
        let m = ScoreMatrix::from_rows(vec![vec![0.2], vec![0.4]]).unwrap();
        assert!(close(mcm(&m).unwrap(), 0.1));
        let b = vbcm(&m).unwrap();
        assert!(close(b["g0"], -0.1));
        assert!(close(b["g1"], 0.1));
    }

    #[test]
    fn row_means() {
        let m = ScoreMatrix::from_rows(vec![vec![0.2, 0.4]]).unwrap();
        assert!(close(v(&m)["g0"], 0.3));
    }

    #[test]
    fn majority_background() {
        let m = ScoreMatrix::from_rows(vec![vec![0.5], vec![0.3]]).unwrap();
        let out = mbcm(&m, "g0").unwrap();
        assert_eq!(out.len(), 1);
        assert!(close(out["g1"], -0.2));

        let same = ScoreMatrix::from_rows(vec![vec![0.5, 0.1], vec![0.5, 0.1]]).unwrap();
        assert!(close(mbcm(&same, "g0").unwrap()["g1"], 0.0));
        assert_eq!(
            mbcm(&m, "nope").unwrap_err(),
            MetricError::UnknownMajorityGroup("nope".into())
        );
    }

    #[test]
    fn single_group_is_rejected() {
        let m = ScoreMatrix::from_rows(vec![vec![0.5, 0.6]]).unwrap();
        assert_eq!(mcm(&m).unwrap_err(), MetricError::SingleGroup);
        assert_eq!(vbcm(&m).unwrap_err(), MetricError::SingleGroup);
    }
}
