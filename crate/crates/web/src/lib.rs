//! Browser bindings for a three-panel demo page: expand templates, compute
//! metrics on an editable score matrix, and run significance tests.
//!
//! Every binding takes and returns JSON text. The logic lives in [`api`] so it
//! can be tested natively; the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod api {
    use std::collections::BTreeMap;

    use biasprobe::corpus::{expand, parse_lexicon_file, parse_template_document};
    use biasprobe::metrics::{mbcm, mcm, v, vbcm, ScoreMatrix};
    use biasprobe::stats::{friedman, mcnemar_counts, wilcoxon_signed_rank, McNemarOptions, TestResult};
    use biasprobe::{Attribute, Gender};
    use serde::Deserialize;
    use serde_json::{json, Value};

    pub type ApiResult = Result<String, String>;

    /// Samples beyond this many are counted but not returned.
    pub const PREVIEW_LIMIT: usize = 200;

    fn text(value: Value) -> ApiResult {
        serde_json::to_string(&value).map_err(|e| e.to_string())
    }

    fn languages(list: &str) -> Vec<String> {
        list.split(',')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect()
    }

    /// Expands a template document against a lexicon for the comma-separated
    /// `language_list`, returning per-attribute counts and the first samples.
    pub fn expand_preview(templates: &str, lexicon: &str, language_list: &str) -> ApiResult {
        let set = parse_template_document(templates.as_bytes()).map_err(|e| e.to_string())?;
        let lexicon = parse_lexicon_file(lexicon.as_bytes()).map_err(|e| e.to_string())?;
        let languages = languages(language_list);
        if languages.is_empty() {
            return Err("no languages given".into());
        }
        set.check(&languages).map_err(|e| e.to_string())?;
        let samples =
            expand(&set, &lexicon, &languages, &Attribute::ALL).map_err(|e| e.to_string())?;
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for s in &samples {
            *counts.entry(s.attribute.to_string()).or_default() += 1;
        }
        let shown: Vec<Value> = samples
            .iter()
            .take(PREVIEW_LIMIT)
            .map(|s| json!({"sample_id": s.sample_id, "text": s.text, "gold_label": s.gold_label}))
            .collect();
        text(json!({"total": samples.len(), "by_attribute": counts, "samples": shown}))
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct MatrixInput {
        groups: Vec<String>,
        values: Vec<Vec<f64>>,
        #[serde(default)]
        majority: Option<String>,
    }

    /// Metrics of a groups x templates matrix given as
    /// `{"groups": [...], "values": [[...]], "majority": "name"?}`.
    pub fn matrix_metrics(input: &str) -> ApiResult {
        let input: MatrixInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
        let n = input.values.first().map_or(0, Vec::len);
        let matrix = ScoreMatrix::new(
            Attribute::Race,
            "xx",
            Gender::Female,
            input.groups,
            (0..n).map(|j| format!("t{j}")).collect(),
            input.values,
        )
        .map_err(|e| e.to_string())?;
        let mbcm = match &input.majority {
            Some(g) => Some(mbcm(&matrix, g).map_err(|e| e.to_string())?),
            None => None,
        };
        text(json!({
            "mcm": mcm(&matrix).ok(),
            "vbcm": vbcm(&matrix).ok(),
            "v": v(&matrix),
            "mbcm": mbcm,
        }))
    }

    #[derive(Deserialize)]
    #[serde(tag = "test", rename_all = "snake_case", deny_unknown_fields)]
    enum TestInput {
        Mcnemar { b: u64, c: u64 },
        Wilcoxon { x: Vec<f64>, y: Vec<f64> },
        Friedman { rows: Vec<Vec<f64>> },
    }

    /// Runs the test named by the `test` field of `input`.
    pub fn significance(input: &str) -> ApiResult {
        let input: TestInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
        let result: TestResult = match input {
            TestInput::Mcnemar { b, c } => mcnemar_counts(b, c, &McNemarOptions::default()),
            TestInput::Wilcoxon { x, y } => wilcoxon_signed_rank(&x, &y).map_err(|e| e.to_string())?,
            TestInput::Friedman { rows } => friedman(&rows).map_err(|e| e.to_string())?,
        };
        serde_json::to_string(&result).map_err(|e| e.to_string())
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        fn parse(s: &str) -> Value {
            serde_json::from_str(s).unwrap()
        }

        #[test]
        fn metrics_of_two_point_column() {
            let out = parse(&matrix_metrics(r#"{"groups":["a","b"],"values":[[0.2],[0.4]],"majority":"a"}"#).unwrap());
            assert!((out["mcm"].as_f64().unwrap() - 0.1).abs() < 1e-12);
            assert!((out["mbcm"]["b"].as_f64().unwrap() - 0.2).abs() < 1e-12);
            assert!(out["mbcm"].get("a").is_none());
        }

        #[test]
        fn single_group_has_null_spread() {
            let out = parse(&matrix_metrics(r#"{"groups":["a"],"values":[[0.2,0.4]]}"#).unwrap());
            assert!(out["mcm"].is_null());
            assert!((out["v"]["a"].as_f64().unwrap() - 0.3).abs() < 1e-12);
        }

        #[test]
        fn bad_matrix_is_an_error() {
            assert!(matrix_metrics(r#"{"groups":["a"],"values":[[1.5]]}"#).is_err());
            assert!(matrix_metrics("not json").is_err());
        }

        #[test]
        fn tests_dispatch_on_name() {
            let m = parse(&significance(r#"{"test":"mcnemar","b":15,"c":5}"#).unwrap());
            assert!((m["p_value"].as_f64().unwrap() - 0.04139).abs() < 1e-5);
            let f = parse(&significance(r#"{"test":"friedman","rows":[[1,2,3],[1,2,3]]}"#).unwrap());
            assert_eq!(f["statistic"].as_f64(), Some(4.0));
            let w = parse(
                &significance(r#"{"test":"wilcoxon","x":[5,4,3,2,1],"y":[0,0,0,0,0]}"#).unwrap(),
            );
            assert_eq!(w["p_value"].as_f64(), Some(0.0625));
            assert!(significance(r#"{"test":"anova"}"#).is_err());
        }
    }
}

fn to_js(result: api::ApiResult) -> Result<String, JsValue> {
    result.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = expandPreview)]
pub fn expand_preview(templates: &str, lexicon: &str, languages: &str) -> Result<String, JsValue> {
    to_js(api::expand_preview(templates, lexicon, languages))
}

#[wasm_bindgen(js_name = matrixMetrics)]
pub fn matrix_metrics(input: &str) -> Result<String, JsValue> {
    to_js(api::matrix_metrics(input))
}

#[wasm_bindgen]
pub fn significance(input: &str) -> Result<String, JsValue> {
    to_js(api::significance(input))
}
