//! Re-reads emitted artifacts and checks them against their schemas.

use std::path::Path;

use espm::cell::TRACE_HEADER;
use espm::identification::{CycleLabel, ExperimentalDataset};

use crate::error::{CliError, CliResult};

pub const ENVELOPE_HEADER: [&str; 7] = [
    "kprime_n_1_s",
    "betaprime_n_1_s",
    "capacity_Ah",
    "final_R_film_ohm",
    "a_t_n_start_m2_m3",
    "a_t_n_end_m2_m3",
    "termination",
];

fn fail(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Verify(format!("{}: {msg}", path.display()))
}

/// Numeric CSV with an exact header; returns the rows.
fn read_numeric_csv(path: &Path, header: &[&str], numeric_columns: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| fail(path, e))?;
    let found = rdr.headers().map_err(|e| fail(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(fail(path, format!("header `{}` != `{}`", found.iter().collect::<Vec<_>>().join(","), header.join(","))));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| fail(path, e))?;
        if rec.len() != header.len() {
            return Err(fail(path, format!("row {} has {} fields", k + 2, rec.len())));
        }
        let row = (0..numeric_columns)
            .map(|i| match rec[i].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(fail(path, format!("row {} column {}: `{}` is not a finite number", k + 2, header[i], &rec[i]))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn trace_csv(path: &Path, expected_rows: usize) -> CliResult<()> {
    let rows = read_numeric_csv(path, &TRACE_HEADER, TRACE_HEADER.len())?;
    if rows.len() != expected_rows {
        return Err(fail(path, format!("{} rows, expected {expected_rows}", rows.len())));
    }
    if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(fail(path, "time column not strictly increasing"));
    }
    Ok(())
}

pub fn envelope_csv(path: &Path, expected_rows: usize, sort_column: usize) -> CliResult<()> {
    let rows = read_numeric_csv(path, &ENVELOPE_HEADER, ENVELOPE_HEADER.len() - 1)?;
    if rows.len() != expected_rows {
        return Err(fail(path, format!("{} rows, expected {expected_rows}", rows.len())));
    }
    if rows.windows(2).any(|w| w[1][sort_column] < w[0][sort_column]) {
        return Err(fail(path, "rows not sorted by the swept coefficient"));
    }
    Ok(())
}

/// JSON object containing every key in `required`.
pub fn json_with_keys(path: &Path, required: &[&str]) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| fail(path, e))?;
    let obj = value.as_object().ok_or_else(|| fail(path, "top level is not an object"))?;
    if let Some(missing) = required.iter().find(|k| !obj.contains_key(**k)) {
        return Err(fail(path, format!("missing key `{missing}`")));
    }
    Ok(value)
}

/// Identification report: identified values inside their bounds and a
/// nonincreasing best-cost history that ends at the reported cost.
pub fn report_json(path: &Path, required: &[&str]) -> CliResult<()> {
    let value = json_with_keys(path, required)?;
    let entries = value["identified"]
        .as_array()
        .ok_or_else(|| fail(path, "`identified` is not an array"))?;
    for e in entries {
        let get = |k: &str| e[k].as_f64().ok_or_else(|| fail(path, format!("entry missing `{k}`")));
        let (v, lo, hi) = (get("value")?, get("lower")?, get("upper")?);
        if !(lo <= v && v <= hi) {
            return Err(fail(path, format!("{} = {v} outside [{lo}, {hi}]", e["name"])));
        }
    }
    let history: Vec<f64> = value["history"]
        .as_array()
        .ok_or_else(|| fail(path, "`history` is not an array"))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| fail(path, "non-numeric history entry")))
        .collect::<CliResult<_>>()?;
    if history.windows(2).any(|w| w[1] > w[0]) {
        return Err(fail(path, "best-cost history increases"));
    }
    if history.last().copied() != value["cost"].as_f64() {
        return Err(fail(path, "history does not end at the reported cost"));
    }
    Ok(())
}

pub fn dataset_csv(path: &Path, current_a: f64, temperature_k: f64, label: CycleLabel, expected: usize) -> CliResult<()> {
    let d = ExperimentalDataset::from_csv(path, current_a, temperature_k, label).map_err(|e| fail(path, e))?;
    if d.len() != expected {
        return Err(fail(path, format!("{} samples, expected {expected}", d.len())));
    }
    Ok(())
}
