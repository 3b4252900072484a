//! Combine the summaries of several report bundles into one table.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::report::{rows, Row};

#[derive(Debug, thiserror::Error)]
pub enum MergeError {
    #[error("no reports given")]
    Empty,
    #[error("none of the {0} reports could be read")]
    AllSkipped(usize),
}

pub struct Merged {
    pub rows: Vec<Row>,
    pub skipped: Vec<(PathBuf, String)>,
}

/// A report path is either the JSON file or the bundle directory holding
/// `report.json`.
fn read_report(path: &Path) -> Result<Value, String> {
    let file = if path.is_dir() {
        path.join("report.json")
    } else {
        path.to_path_buf()
    };
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let value: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if !value["scenario"].is_string() || !value["checks"].is_array() {
        return Err("not a scenario report".into());
    }
    Ok(value)
}

/// Rows of all readable reports in argument order. A scenario name seen
/// before gets a `#k` suffix.
pub fn merge(paths: &[PathBuf]) -> Result<Merged, MergeError> {
    if paths.is_empty() {
        return Err(MergeError::Empty);
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let mut read = 0;
    for path in paths {
        match read_report(path) {
            Ok(value) => {
                read += 1;
                let name = value["scenario"].as_str().unwrap_or_default().to_string();
                let count = seen.entry(name.clone()).or_insert(0);
                *count += 1;
                let label = if *count == 1 {
                    name
                } else {
                    format!("{name}#{count}")
                };
                out.extend(rows(&value, &label));
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push((path.clone(), e));
            }
        }
    }
    if read == 0 {
        return Err(MergeError::AllSkipped(paths.len()));
    }
    Ok(Merged { rows: out, skipped })
}
