//! Panel CSV files and JSON test results.
//!
//! A panel file has one header row of series labels followed by one row per
//! time point, oldest first.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::base::PanelData;
use crate::error::{Error, Result};
use crate::unitroot::UnitRootResult;
use crate::whitenoise::WnTestResult;

/// Version tag written into every JSON result.
pub const SCHEMA_VERSION: u32 = 1;

/// Parse panel CSV text. Row numbers in errors count file lines from 1
/// (the header is row 1); column numbers count from 1.
pub fn parse_panel_csv(text: &str) -> Result<PanelData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|_| Error::MalformedRow(1))?,
        None => return Err(Error::EmptyInput),
    };
    let labels: Vec<String> = header.iter().map(str::to_string).collect();
    let k = labels.len();
    let mut columns = vec![Vec::new(); k];
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|_| Error::MalformedRow(row))?;
        if rec.len() != k {
            return Err(Error::MalformedRow(row));
        }
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::ParseCell(row, c + 1))?;
            if !v.is_finite() {
                return Err(Error::ParseCell(row, c + 1));
            }
            columns[c].push(v);
        }
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(Error::EmptyInput);
    }
    PanelData::new(labels, columns)
}

pub fn load_panel_csv(path: impl AsRef<Path>) -> Result<PanelData> {
    parse_panel_csv(&fs::read_to_string(path)?)
}

/// Render a panel with 17 significant digits, enough to round-trip exactly.
pub fn panel_to_csv(panel: &PanelData) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(panel.labels()).expect("in-memory write");
    for t in 0..panel.n() {
        w.write_record((0..panel.k()).map(|i| format!("{:.16e}", panel.series(i)[t])))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn save_panel_csv(panel: &PanelData, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, panel_to_csv(panel))?;
    Ok(())
}

fn versioned(mut v: Value) -> String {
    v["schema_version"] = SCHEMA_VERSION.into();
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn unit_root_json(result: &UnitRootResult, labels: &[String]) -> String {
    versioned(json!({
        "test": "unitroot",
        "stat": result.max_stat,
        "L": result.l_used,
        "critical_value": result.critical_value,
        "p_value": result.p_value,
        "reject": result.reject,
        "level": result.level,
        "bandwidth": result.bandwidth,
        "kernel": result.kernel,
        "mode": result.mode,
        "per_series": result.per_series,
        "labels": labels,
    }))
}

pub fn white_noise_json(
    result: &WnTestResult,
    label: &str,
    p: usize,
    block_len: Option<usize>,
) -> String {
    versioned(json!({
        "test": "whitenoise",
        "series": label,
        "p": p,
        "stat": result.max_stat,
        "L": result.lags,
        "per_lag": result.per_lag,
        "p_value": result.p_value,
        "reject": result.reject,
        "method": result.method,
        "block_len": block_len,
    }))
}
