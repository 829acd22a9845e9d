//! CSV / JSON serialization of a [`SweepResult`].
//!
//! CSV header (fixed):
//!
//! ```text
//! param1,param2,max_re_lambda,verdict,n_classes,cycle_residual,error_code
//! ```
//!
//! Convergence runs append an `abs_dev` column. Boundary bisection appends a
//! final row with verdict `boundary` whose `param1` is the located boundary.
//! Reals are written as `{:.16e}` (17 significant digits); missing values are
//! empty fields. Wall times and timestamps live only in the metadata sidecar,
//! so identical configs give byte-identical result files.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{Format, Mode, SweepConfig};
use crate::run::{Boundary, SweepResult};

pub const CSV_HEADER: &str =
    "param1,param2,max_re_lambda,verdict,n_classes,cycle_residual,error_code";

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn to_csv(r: &SweepResult) -> String {
    let convergence = r.config.mode == Mode::Convergence;
    let mut out = String::from(CSV_HEADER);
    if convergence {
        out.push_str(",abs_dev");
    }
    out.push('\n');
    for row in &r.rows {
        let e = &row.eval;
        let fields = [
            num(row.params.first().copied()),
            num(row.params.get(1).copied()),
            num(e.max_re),
            e.verdict.clone(),
            e.n_classes.map(|n| n.to_string()).unwrap_or_default(),
            num(e.cycle_residual),
            e.error_code.clone().unwrap_or_default(),
        ];
        out.push_str(&fields.join(","));
        if convergence {
            out.push(',');
            out.push_str(&num(row.abs_dev));
        }
        out.push('\n');
    }
    if let Some(b) = &r.boundary {
        let code = b.error_code.clone().unwrap_or_default();
        out.push_str(&format!("{},,,boundary,,,{code}\n", num(b.value)));
    }
    out
}

#[derive(Serialize)]
struct JsonRow<'a> {
    param1: Option<f64>,
    param2: Option<f64>,
    max_re_lambda: Option<f64>,
    verdict: &'a str,
    n_classes: Option<usize>,
    cycle_residual: Option<f64>,
    error_code: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<&'a str>,
    /// `[re, im]` of each canonical exponent.
    exponents: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct JsonResult<'a> {
    model: &'a str,
    mode: &'a str,
    columns: &'a [String],
    rows: Vec<JsonRow<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary: Option<&'a Boundary>,
}

pub fn to_json(r: &SweepResult) -> String {
    let rows = r
        .rows
        .iter()
        .map(|row| {
            let e = &row.eval;
            JsonRow {
                param1: row.params.first().copied(),
                param2: row.params.get(1).copied(),
                max_re_lambda: e.max_re,
                verdict: &e.verdict,
                n_classes: e.n_classes,
                cycle_residual: e.cycle_residual,
                error_code: e.error_code.as_deref(),
                abs_dev: row.abs_dev,
                regime: e.regime,
                exponents: e.exponents.iter().map(|z| [z.re, z.im]).collect(),
            }
        })
        .collect();
    let doc = JsonResult {
        model: r.config.model.as_str(),
        mode: r.config.mode.as_str(),
        columns: &r.columns,
        rows,
        boundary: r.boundary.as_ref(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
    s.push('\n');
    s
}

pub fn emit(r: &SweepResult, format: Format) -> String {
    match format {
        Format::Csv => to_csv(r),
        Format::Json => to_json(r),
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    library_version: &'a str,
    timestamp_unix: u64,
    config: &'a SweepConfig,
    wall_ms: Vec<f64>,
    /// Raw exponent candidates removed by the lower bound, per row.
    bound_filtered: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bracket_history: Option<&'a [crate::run::Bracket]>,
}

/// Non-deterministic run metadata, written next to the result file.
pub fn metadata_json(r: &SweepResult) -> String {
    let meta = Meta {
        library_version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: &r.config,
        wall_ms: r.rows.iter().map(|row| row.wall_ms).collect(),
        bound_filtered: r
            .rows
            .iter()
            .map(|row| {
                row.eval
                    .bound_filtered
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect()
            })
            .collect(),
        bracket_history: r.boundary.as_ref().map(|b| b.history.as_slice()),
    };
    let mut s = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    s.push('\n');
    s
}
