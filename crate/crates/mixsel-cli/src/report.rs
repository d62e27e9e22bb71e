//! CSV and JSON writers shared by the subcommands.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so parsing
//! a CSV back recovers bit-identical values and output bytes are stable
//! across runs and worker counts.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use mixsel::{CriterionRow, SlopeReport};

use crate::error::{runtime, Result};

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn open_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut wtr: csv::Writer<File>, path: &Path) -> Result<()> {
    wtr.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// Writes the per-model criterion table.
pub fn write_criterion_csv(path: &Path, rows: &[CriterionRow]) -> Result<()> {
    let mut wtr = open_writer(path)?;
    let ctx = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    wtr.write_record([
        "model",
        "dim",
        "contrast",
        "p_w",
        "pen",
        "pen_unit",
        "std_error",
        "risk",
        "ideal_pen",
    ])
    .map_err(ctx)?;
    for row in rows {
        wtr.write_record([
            row.model_index.to_string(),
            row.dim.to_string(),
            row.contrast.to_string(),
            row.p_w.to_string(),
            row.pen.to_string(),
            row.pen_unit.to_string(),
            row.std_error.to_string(),
            fmt_opt(row.risk),
            fmt_opt(row.ideal_pen),
        ])
        .map_err(ctx)?;
    }
    finish(wtr, path)
}

/// Writes the slope path: one row per grid multiplier with the selected
/// model and its complexity.
pub fn write_slope_path_csv(path: &Path, report: &SlopeReport) -> Result<()> {
    let mut wtr = open_writer(path)?;
    let ctx = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    wtr.write_record(["k", "model", "dim", "delta"]).map_err(ctx)?;
    for point in &report.path {
        let delta = report
            .rows
            .iter()
            .find(|r| r.model_index == point.selected)
            .map(|r| r.delta.to_string())
            .unwrap_or_default();
        wtr.write_record([
            point.k.to_string(),
            point.selected.to_string(),
            point.selected_dim.to_string(),
            delta,
        ])
        .map_err(ctx)?;
    }
    finish(wtr, path)
}

/// Writes a simulated sample, one observation per line under an `x` header.
pub fn write_sample_csv(path: &Path, data: &[f64]) -> Result<()> {
    let mut wtr = open_writer(path)?;
    let ctx = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    wtr.write_record(["x"]).map_err(ctx)?;
    for &x in data {
        wtr.write_record([x.to_string()]).map_err(ctx)?;
    }
    finish(wtr, path)
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let ctx = |e: String| runtime(format!("{}: {e}", path.display()));
    let mut file = File::create(path).map_err(|e| ctx(e.to_string()))?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| ctx(e.to_string()))?;
    file.write_all(b"\n").map_err(|e| ctx(e.to_string()))?;
    Ok(())
}

/// Reads a sample from CSV: one value per line, optional header line.
pub fn read_sample_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::error::validation(format!("cannot read data {}: {e}", path.display())))?;
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed.parse::<f64>() {
            Ok(v) => data.push(v),
            Err(e) => {
                // Tolerate a single header line at the top.
                if lineno == 0 {
                    continue;
                }
                return Err(crate::error::validation(format!(
                    "{}:{}: `{trimmed}`: {e}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    if data.is_empty() {
        return Err(crate::error::validation(format!(
            "{}: no observations found",
            path.display()
        )));
    }
    Ok(data)
}
