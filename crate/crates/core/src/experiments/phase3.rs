use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ComparisonKind, ComparisonSpec, ExperimentError, Phase2Report, Result};
use crate::domain::{Attribute, Gender};
use crate::metrics::{mcm_delta, MetricReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRecord {
    pub kind: ComparisonKind,
    pub mono: String,
    pub multi: String,
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    pub mcm_mono: f64,
    pub mcm_multi: f64,
    pub delta: f64,
    pub amplified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub kind: ComparisonKind,
    pub mono: String,
    pub multi: String,
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    pub group: String,
    pub v_mono: f64,
    pub v_multi: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedComparison {
    pub kind: ComparisonKind,
    pub mono: String,
    pub multi: String,
    pub attribute: Attribute,
    pub language: String,
    pub gender: Gender,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationSummary {
    pub kind: ComparisonKind,
    pub cells: usize,
    pub amplified: usize,
    /// `amplified / cells`, 0 when no cell was compared.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase3Report {
    /// Column order for language-wide tables.
    pub languages: Vec<String>,
    pub deltas: Vec<DeltaRecord>,
    pub shifts: Vec<ShiftRecord>,
    pub skipped: Vec<SkippedComparison>,
    pub summary: Vec<AmplificationSummary>,
}

type CellKey = (Attribute, String, Gender);

fn keyed<'a>(reports: &[&'a MetricReport]) -> Result<BTreeMap<CellKey, &'a MetricReport>> {
    let mut out = BTreeMap::new();
    for r in reports {
        if out.insert((r.attribute, r.language.clone(), r.gender), *r).is_some() {
            return Err(ExperimentError::MismatchedCells(format!(
                "two reports for {}",
                r.cell_label()
            )));
        }
    }
    Ok(out)
}

fn summarize(deltas: &[DeltaRecord], kinds: &[ComparisonKind]) -> Vec<AmplificationSummary> {
    let mut counts: BTreeMap<ComparisonKind, (usize, usize)> =
        kinds.iter().map(|k| (*k, (0, 0))).collect();
    for d in deltas {
        let slot = counts.entry(d.kind).or_default();
        slot.0 += 1;
        slot.1 += usize::from(d.amplified);
    }
    counts
        .into_iter()
        .map(|(kind, (cells, amplified))| AmplificationSummary {
            kind,
            cells,
            amplified,
            fraction: if cells == 0 { 0.0 } else { amplified as f64 / cells as f64 },
        })
        .collect()
}

/// Compares two report sets cell by cell. Both sets must cover the same
/// (attribute, language, gender) cells and groups.
pub fn compare_reports(
    spec: &ComparisonSpec,
    mono: &[&MetricReport],
    multi: &[&MetricReport],
) -> Result<Phase3Report> {
    let mono_cells = keyed(mono)?;
    let multi_cells = keyed(multi)?;
    if let Some(key) = mono_cells
        .keys()
        .find(|k| !multi_cells.contains_key(*k))
        .or_else(|| multi_cells.keys().find(|k| !mono_cells.contains_key(*k)))
    {
        return Err(ExperimentError::MismatchedCells(format!(
            "{}/{}/{} present for only one of {} and {}",
            key.0, key.1, key.2, spec.mono, spec.multi
        )));
    }

    let mut languages: Vec<String> = mono_cells.keys().map(|k| k.1.clone()).collect();
    languages.sort();
    languages.dedup();
    let mut report = Phase3Report {
        languages,
        deltas: Vec::new(),
        shifts: Vec::new(),
        skipped: Vec::new(),
        summary: Vec::new(),
    };
    for (key, a) in &mono_cells {
        let b = multi_cells[key];
        if a.v.keys().ne(b.v.keys()) {
            return Err(ExperimentError::MismatchedCells(format!(
                "group sets differ for {}",
                a.cell_label()
            )));
        }
        for (group, v_mono) in &a.v {
            let v_multi = b.v[group];
            report.shifts.push(ShiftRecord {
                kind: spec.kind,
                mono: spec.mono.clone(),
                multi: spec.multi.clone(),
                attribute: key.0,
                language: key.1.clone(),
                gender: key.2,
                group: group.clone(),
                v_mono: *v_mono,
                v_multi,
                shift: v_multi - v_mono,
            });
        }
        match (a.mcm, b.mcm) {
            (Some(mcm_mono), Some(mcm_multi)) => {
                let d = mcm_delta(a, b)?;
                report.deltas.push(DeltaRecord {
                    kind: spec.kind,
                    mono: spec.mono.clone(),
                    multi: spec.multi.clone(),
                    attribute: key.0,
                    language: key.1.clone(),
                    gender: key.2,
                    mcm_mono,
                    mcm_multi,
                    delta: d.delta,
                    amplified: d.amplified,
                });
            }
            _ => report.skipped.push(SkippedComparison {
                kind: spec.kind,
                mono: spec.mono.clone(),
                multi: spec.multi.clone(),
                attribute: key.0,
                language: key.1.clone(),
                gender: key.2,
                reason: "single-group cell has no MCM".into(),
            }),
        }
    }
    report.summary = summarize(&report.deltas, &[spec.kind]);
    Ok(report)
}

/// Applies every comparison to a phase-2 report; `mono` and `multi` may name
/// a model id or a seed family.
pub fn run_phase3(comparisons: &[ComparisonSpec], phase2: &Phase2Report) -> Result<Phase3Report> {
    let mut out = Phase3Report {
        languages: phase2.languages.clone(),
        deltas: Vec::new(),
        shifts: Vec::new(),
        skipped: Vec::new(),
        summary: Vec::new(),
    };
    for spec in comparisons {
        let mono = phase2.reports_for(&spec.mono);
        if mono.is_empty() {
            return Err(ExperimentError::UnknownModel(spec.mono.clone()));
        }
        let multi = phase2.reports_for(&spec.multi);
        if multi.is_empty() {
            return Err(ExperimentError::UnknownModel(spec.multi.clone()));
        }
        let part = compare_reports(spec, &mono, &multi)?;
        out.deltas.extend(part.deltas);
        out.shifts.extend(part.shifts);
        out.skipped.extend(part.skipped);
    }
    let kinds: Vec<ComparisonKind> = comparisons.iter().map(|c| c.kind).collect();
    out.summary = summarize(&out.deltas, &kinds);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(model: &str, language: &str, mcm: f64, v: f64) -> MetricReport {
        MetricReport {
            attribute: Attribute::Race,
            language: language.into(),
            gender: Gender::Female,
            model_id: model.into(),
            n_groups: 2,
            n_templates: 1,
            n_samples: 2,
            mcm: Some(mcm),
            vbcm: None,
            v: BTreeMap::from([("Asian".into(), v), ("Black".into(), v)]),
            majority_group: None,
            mbcm: None,
        }
    }

    fn spec() -> ComparisonSpec {
        ComparisonSpec {
            kind: ComparisonKind::Finetune,
            mono: "mono".into(),
            multi: "multi".into(),
        }
    }

    #[test]
    fn identical_reports() {
        let a = report("mono", "en", 0.1, 0.5);
        let r = compare_reports(&spec(), &[&a], &[&a]).unwrap();
        assert_eq!(r.deltas[0].delta, 0.0);
        assert_eq!(r.summary[0].fraction, 0.0);
        assert!(r.shifts.iter().all(|s| s.shift == 0.0));
    }

    #[test]
    fn shifts_are_multi_minus_mono() {
        let a = report("mono", "en", 0.1, 0.5);
        let b = report("multi", "en", 0.2, 0.7);
        let r = compare_reports(&spec(), &[&a], &[&b]).unwrap();
        assert!((r.shifts[0].shift - 0.2).abs() < 1e-12);
        assert!(r.deltas[0].amplified);
        assert_eq!(r.summary[0].amplified, 1);
    }

    #[test]
    fn mismatched_cells() {
        let a = report("mono", "en", 0.1, 0.5);
        let b = report("multi", "es", 0.1, 0.5);
        assert!(matches!(
            compare_reports(&spec(), &[&a], &[&b]),
            Err(ExperimentError::MismatchedCells(_))
        ));
    }

    #[test]
    fn single_group_cells_are_skipped() {
        let mut a = report("mono", "en", 0.0, 0.5);
        a.mcm = None;
        let r = compare_reports(&spec(), &[&a], &[&a]).unwrap();
        assert!(r.deltas.is_empty());
        assert_eq!(r.skipped.len(), 1);
        assert_eq!(r.summary[0].cells, 0);
        assert_eq!(r.summary[0].fraction, 0.0);
    }
}
