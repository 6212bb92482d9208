use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{io_failure, ExperimentError, Phase1Report, Phase2Report, Phase3Report, Result};
use crate::domain::{Attribute, Gender};
use crate::metrics::MetricReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Report {
    Phase1(Phase1Report),
    Phase2(Phase2Report),
    Phase3(Phase3Report),
}

impl Report {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Phase1(_) => "phase1",
            Self::Phase2(_) => "phase2",
            Self::Phase3(_) => "phase3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    Json,
    Csv,
}

/// Pretty JSON with object keys sorted and floats at full precision, so that
/// loading it back reproduces the report exactly.
pub fn report_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("reports contain only finite numbers");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

pub fn load_report(bytes: &[u8]) -> Result<Report> {
    serde_json::from_slice(bytes).map_err(|e| ExperimentError::MalformedReport(e.to_string()))
}

/// Writes the report into `dir` and returns the written paths in write order.
pub fn emit_report(report: &Report, format: EmitFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let files: Vec<(String, Vec<u8>)> = match format {
        EmitFormat::Json => vec![(format!("{}.json", report.name()), report_json(report).into_bytes())],
        EmitFormat::Csv => match report {
            Report::Phase1(r) => phase1_tables(r),
            Report::Phase2(r) => phase2_tables(r),
            Report::Phase3(r) => phase3_tables(r),
        },
    };
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_failure(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Fixed six-decimal rendering; negative zero prints as zero.
fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn opt6(x: Option<f64>) -> String {
    x.map(fmt6).unwrap_or_default()
}

fn table(header: Vec<String>, rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn strings<const N: usize>(items: [&str; N]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn phase1_tables(r: &Phase1Report) -> Vec<(String, Vec<u8>)> {
    let languages = &r.p_values.languages;
    let accuracy = languages
        .iter()
        .filter_map(|l| r.accuracy.get(l).map(|a| (l, a)))
        .map(|(l, a)| vec![l.clone(), a.n.to_string(), fmt6(a.three_way), opt6(a.two_way)])
        .collect();
    let mut p_header = vec!["language".to_string()];
    p_header.extend(languages.iter().cloned());
    let p_rows = languages
        .iter()
        .zip(&r.p_values.p)
        .map(|(l, row)| std::iter::once(l.clone()).chain(row.iter().map(|p| fmt6(*p))).collect())
        .collect();
    let sets = r
        .language_sets
        .iter()
        .enumerate()
        .flat_map(|(i, set)| set.iter().map(move |l| vec![(i + 1).to_string(), l.clone()]))
        .collect();
    vec![
        (
            "phase1_accuracy.csv".into(),
            table(strings(["language", "n", "three_way", "two_way"]), accuracy),
        ),
        ("phase1_pvalues.csv".into(), table(p_header, p_rows)),
        ("phase1_sets.csv".into(), table(strings(["set", "language"]), sets)),
    ]
}

fn cell_column(language: &str, gender: Gender) -> String {
    format!("{language}_{}", gender.short())
}

/// One table per attribute: rows are (model, metric, group), columns are
/// language x subject gender.
fn attribute_table(attribute: Attribute, languages: &[String], reports: &[&MetricReport]) -> Vec<u8> {
    let mut header = strings(["model", "metric", "group"]);
    for l in languages {
        for g in Gender::BOTH {
            header.push(cell_column(l, g));
        }
    }
    let mut models: Vec<&str> = Vec::new();
    for r in reports.iter().filter(|r| r.attribute == attribute) {
        if !models.contains(&r.model_id.as_str()) {
            models.push(&r.model_id);
        }
    }

    let mut rows = Vec::new();
    for model in models {
        let cells: BTreeMap<(String, Gender), &MetricReport> = reports
            .iter()
            .filter(|r| r.attribute == attribute && r.model_id == model)
            .map(|r| ((r.language.clone(), r.gender), *r))
            .collect();
        let row = |metric: &str, group: &str, value: &dyn Fn(&MetricReport) -> Option<f64>| {
            let mut out = vec![model.to_string(), metric.to_string(), group.to_string()];
            let mut any = false;
            for l in languages {
                for g in Gender::BOTH {
                    let v = cells.get(&(l.clone(), g)).and_then(|r| value(r));
                    any |= v.is_some();
                    out.push(opt6(v));
                }
            }
            any.then_some(out)
        };
        rows.extend(row("mcm", "", &|r| r.mcm));
        let groups: BTreeSet<&String> = cells.values().flat_map(|r| r.v.keys()).collect();
        for group in &groups {
            rows.extend(row("v", group, &|r| r.v.get(*group).copied()));
        }
        for group in &groups {
            rows.extend(row("vbcm", group, &|r| r.vbcm.as_ref().and_then(|m| m.get(*group)).copied()));
        }
        for group in &groups {
            rows.extend(row("mbcm", group, &|r| r.mbcm.as_ref().and_then(|m| m.get(*group)).copied()));
        }
    }
    table(header, rows)
}

fn phase2_tables(r: &Phase2Report) -> Vec<(String, Vec<u8>)> {
    let reports: Vec<&MetricReport> = r
        .cells
        .iter()
        .map(|c| &c.metrics)
        .chain(r.averaged.iter())
        .collect();
    let mut files: Vec<(String, Vec<u8>)> = r
        .attributes
        .iter()
        .map(|a| (format!("phase2_{a}.csv"), attribute_table(*a, &r.languages, &reports)))
        .collect();

    let tests = r
        .cells
        .iter()
        .filter_map(|c| c.group_test.as_ref().map(|t| (&c.metrics, t)))
        .map(|(m, t)| {
            vec![
                m.model_id.clone(),
                m.attribute.to_string(),
                m.language.clone(),
                m.gender.to_string(),
                t.method.as_str().to_string(),
                fmt6(t.statistic),
                fmt6(t.p_value),
                t.n_effective.to_string(),
                t.exact.to_string(),
            ]
        })
        .collect();
    files.push((
        "phase2_tests.csv".into(),
        table(
            strings([
                "model", "attribute", "language", "gender", "method", "statistic", "p_value",
                "n_effective", "exact",
            ]),
            tests,
        ),
    ));

    let gaps = r
        .gender_gaps
        .iter()
        .map(|g| {
            vec![
                g.model_id.clone(),
                g.attribute.to_string(),
                g.language.clone(),
                g.n_pairs.to_string(),
                fmt6(g.mean_difference),
                fmt6(g.test.statistic),
                fmt6(g.test.p_value),
                g.test.exact.to_string(),
            ]
        })
        .collect();
    files.push((
        "phase2_gender_gap.csv".into(),
        table(
            strings([
                "model", "attribute", "language", "n_pairs", "mean_difference", "statistic",
                "p_value", "exact",
            ]),
            gaps,
        ),
    ));

    let skipped = r
        .skipped
        .iter()
        .map(|s| {
            vec![
                s.model_id.clone(),
                s.attribute.to_string(),
                s.language.clone(),
                s.gender.map(|g| g.to_string()).unwrap_or_default(),
                s.reason.clone(),
            ]
        })
        .collect();
    files.push((
        "phase2_skipped.csv".into(),
        table(strings(["model", "attribute", "language", "gender", "reason"]), skipped),
    ));

    let points = r
        .v_distributions
        .iter()
        .map(|p| {
            vec![
                p.model_id.clone(),
                p.attribute.to_string(),
                p.language.clone(),
                p.gender.to_string(),
                p.group.clone(),
                fmt6(p.v),
            ]
        })
        .collect();
    files.push((
        "v_distributions.csv".into(),
        table(strings(["model", "attribute", "language", "gender", "group", "v"]), points),
    ));
    files
}

type RenderDelta = fn(&super::DeltaRecord) -> String;

fn phase3_tables(r: &Phase3Report) -> Vec<(String, Vec<u8>)> {
    let mut header = strings(["setting", "mono", "multi", "attribute", "gender", "value"]);
    header.extend(r.languages.iter().cloned());
    type RowKey = (super::ComparisonKind, String, String, Attribute, Gender);
    let mut grouped: BTreeMap<RowKey, BTreeMap<&str, &super::DeltaRecord>> = BTreeMap::new();
    for d in &r.deltas {
        grouped
            .entry((d.kind, d.mono.clone(), d.multi.clone(), d.attribute, d.gender))
            .or_default()
            .insert(&d.language, d);
    }
    let mut mcm_rows = Vec::new();
    for ((kind, mono, multi, attribute, gender), by_lang) in &grouped {
        let fields: [(&str, RenderDelta); 4] = [
            ("mono", |d| fmt6(d.mcm_mono)),
            ("multi", |d| fmt6(d.mcm_multi)),
            ("delta", |d| fmt6(d.delta)),
            ("amplified", |d| d.amplified.to_string()),
        ];
        for (label, render) in fields {
            let mut row = vec![
                kind.as_str().to_string(),
                mono.clone(),
                multi.clone(),
                attribute.to_string(),
                gender.short().to_string(),
                label.to_string(),
            ];
            row.extend(r.languages.iter().map(|l| by_lang.get(l.as_str()).map(|d| render(d)).unwrap_or_default()));
            mcm_rows.push(row);
        }
    }

    let shifts = r
        .shifts
        .iter()
        .map(|s| {
            vec![
                s.kind.as_str().to_string(),
                s.mono.clone(),
                s.multi.clone(),
                s.attribute.to_string(),
                s.language.clone(),
                s.gender.to_string(),
                s.group.clone(),
                fmt6(s.v_mono),
                fmt6(s.v_multi),
                fmt6(s.shift),
            ]
        })
        .collect();
    let summary = r
        .summary
        .iter()
        .map(|s| {
            vec![
                s.kind.as_str().to_string(),
                s.cells.to_string(),
                s.amplified.to_string(),
                fmt6(s.fraction),
            ]
        })
        .collect();
    vec![
        ("phase3_mcm.csv".into(), table(header, mcm_rows)),
        (
            "phase3_shift.csv".into(),
            table(
                strings([
                    "setting", "mono", "multi", "attribute", "language", "gender", "group",
                    "v_mono", "v_multi", "shift",
                ]),
                shifts,
            ),
        ),
        (
            "phase3_summary.csv".into(),
            table(strings(["setting", "cells", "amplified", "fraction"]), summary),
        ),
    ]
}
