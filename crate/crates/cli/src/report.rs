//! Report bundle on disk and the flat summary rows shared with `--merge`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::pipeline::Outcome;
use crate::plot;

/// Column order of every summary table.
pub const COLUMNS: [&str; 9] = [
    "scenario",
    "check",
    "sweep",
    "resolution",
    "h",
    "max_defect",
    "tolerance",
    "verdict",
    "scenario_verdict",
];

pub type Row = [String; 9];

fn text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// One row per (check, sweep, resolution) of a serialized report. Checks
/// without resolution levels give a single row with an empty resolution.
pub fn rows(report: &Value, scenario: &str) -> Vec<Row> {
    let status = text(&report["verdict"]);
    let mut out = Vec::new();
    let empty = Vec::new();
    for check in report["checks"].as_array().unwrap_or(&empty) {
        let levels = check["levels"].as_array().unwrap_or(&empty);
        let base =
            |resolution: String, h: String, defect: &Value, tol: &Value, verdict: &Value| -> Row {
                [
                    scenario.to_string(),
                    text(&check["check"]),
                    text(&check["sweep"]),
                    resolution,
                    h,
                    text(defect),
                    text(tol),
                    text(verdict),
                    status.clone(),
                ]
            };
        if levels.is_empty() {
            out.push(base(
                String::new(),
                String::new(),
                &check["max_defect"],
                &check["tolerance"],
                &check["verdict"],
            ));
        } else {
            for l in levels {
                let verdict = if l["verdict"].is_null() {
                    &check["verdict"]
                } else {
                    &l["verdict"]
                };
                out.push(base(
                    text(&l["resolution"]),
                    text(&l["h"]),
                    &l["max_defect"],
                    &l["tolerance"],
                    verdict,
                ));
            }
        }
    }
    out
}

pub fn write_rows(path: &Path, rows: &[Row]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

pub fn write_rows_to(out: impl Write, rows: &[Row]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

/// Pretty JSON of the report; identical runs give identical text apart
/// from `generated_at`.
pub fn report_json(outcome: &Outcome) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&outcome.report)?;
    s.push('\n');
    Ok(s)
}

/// Write `report.json`, `summary.csv`, field and barrier tables and plots
/// under `dir/<scenario>/`. Returns the report path.
pub fn write_bundle(
    outcome: &Outcome,
    dir: &Path,
    csv_tables: bool,
    plots: bool,
) -> std::io::Result<PathBuf> {
    let root = dir.join(&outcome.report.scenario);
    std::fs::create_dir_all(&root)?;
    let json = report_json(outcome).map_err(std::io::Error::other)?;
    let report_path = root.join("report.json");
    std::fs::write(&report_path, &json)?;
    let value: Value = serde_json::from_str(&json).map_err(std::io::Error::other)?;
    write_rows(
        &root.join("summary.csv"),
        &rows(&value, &outcome.report.scenario),
    )?;
    if csv_tables {
        let fields = root.join("fields");
        std::fs::create_dir_all(&fields)?;
        for (n, f) in &outcome.artifacts.fields {
            f.write_csv(&fields.join(format!("field-{n}.csv")))
                .map_err(std::io::Error::other)?;
        }
        let barriers = root.join("barriers");
        std::fs::create_dir_all(&barriers)?;
        for (k, b) in outcome.artifacts.barriers.iter().enumerate() {
            b.curve
                .write_csv(&barriers.join(format!("barrier-{k}.csv")))
                .map_err(std::io::Error::other)?;
        }
    }
    if plots {
        let dir = root.join("plots");
        std::fs::create_dir_all(&dir)?;
        for (name, svg) in plot::scenario_plots(outcome) {
            std::fs::write(dir.join(name), svg)?;
        }
    }
    Ok(report_path)
}
