use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::experiment::{Aggregate, Batch, ExperimentResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "table" => Ok(Format::Table),
            _ => Err(format!("unknown format `{s}` (csv, json, table)")),
        }
    }
}

pub const COLUMNS: [&str; 13] = [
    "bench", "algo", "params", "seed", "st.", "tr.", "OQ reset", "OQ step", "EQ", "EQ reset",
    "EQ step", "L. time", "valid?",
];

/// Compact number: thousands and millions get `K` and `M` suffixes.
pub fn abbreviate(x: f64) -> String {
    let (v, suffix) = if x.abs() >= 1e6 {
        (x / 1e6, "M")
    } else if x.abs() >= 1e3 {
        (x / 1e3, "K")
    } else {
        (x, "")
    };
    let body = if v.fract() == 0.0 || (!suffix.is_empty() && v.abs() >= 10.0) {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.1}");
        s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
    };
    format!("{body}{suffix}")
}

fn seconds(x: f64) -> String {
    format!("{x:.3}")
}

fn row_cells(r: &ExperimentResult) -> Vec<String> {
    vec![
        r.bench.clone(),
        r.algorithm.clone(),
        r.params.clone().unwrap_or_default(),
        r.seed.to_string(),
        r.states.to_string(),
        r.transitions.to_string(),
        r.oq_resets.to_string(),
        r.oq_steps.to_string(),
        r.eq_count.to_string(),
        r.eq_resets.to_string(),
        r.eq_steps.to_string(),
        seconds(r.learner_time),
        r.validation.to_string(),
    ]
}

fn aggregate_cells(first: &ExperimentResult, a: &Aggregate, abbreviated: bool) -> Vec<String> {
    let num = |x: f64| {
        if abbreviated {
            abbreviate(x)
        } else {
            format!("{x}")
        }
    };
    vec![
        first
            .bench
            .split(":seed=")
            .next()
            .unwrap_or_default()
            .to_string(),
        first.algorithm.clone(),
        first.params.clone().unwrap_or_default(),
        "mean".to_string(),
        num(a.states),
        num(a.transitions),
        num(a.oq_resets),
        num(a.oq_steps),
        num(a.eq_count),
        num(a.eq_resets),
        num(a.eq_steps),
        seconds(a.learner_time),
        a.validation_triple(),
    ]
}

/// Renders a batch. CSV and tables list one row per instance followed by
/// one aggregate row; an empty batch yields only the header.
pub fn report(batch: &Batch, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(batch)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for r in &batch.rows {
                w.write_record(row_cells(r))?;
            }
            if let Some(first) = batch.rows.first() {
                w.write_record(aggregate_cells(first, &batch.aggregate, false))?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Table => {
            let mut rows: Vec<Vec<String>> = vec![COLUMNS.iter().map(|c| c.to_string()).collect()];
            rows.extend(batch.rows.iter().map(row_cells));
            if let Some(first) = batch.rows.first() {
                rows.push(aggregate_cells(first, &batch.aggregate, true));
            }
            let widths: Vec<usize> = (0..COLUMNS.len())
                .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for r in &rows {
                let cells: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                writeln!(out, "{}", cells.join("  ").trim_end())?;
            }
            Ok(out)
        }
    }
}
