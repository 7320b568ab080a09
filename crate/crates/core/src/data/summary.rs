use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field names every run summary must carry.
pub const SUMMARY_FIELDS: [&str; 7] = ["config", "seed", "slopes", "r2", "fit_range", "elapsed_ms", "version"];

/// Diffable record of one experiment. `config` is sorted by key so identical
/// runs serialize identically apart from `elapsed_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub slopes: Vec<f64>,
    pub r2: Vec<f64>,
    pub fit_range: [usize; 2],
    pub elapsed_ms: u64,
    pub version: String,
}

pub fn write_run_summary(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_run_summary(path: &Path) -> Result<RunSummary> {
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let obj = value.as_object().ok_or_else(|| Error::Schema { field: "<root>".into() })?;
    if let Some(missing) = SUMMARY_FIELDS.iter().find(|f| !obj.contains_key(**f)) {
        return Err(Error::Schema {
            field: (*missing).to_string(),
        });
    }
    for field in SUMMARY_FIELDS {
        check_field(field, serde_json::json!({ field: obj[field] }))?;
    }
    Ok(serde_json::from_value(value)?)
}

/// Type-checks one field so the error can name it.
fn check_field(field: &str, single: serde_json::Value) -> Result<()> {
    #[derive(Deserialize)]
    #[allow(dead_code)]
    struct Partial {
        config: Option<BTreeMap<String, String>>,
        seed: Option<u64>,
        slopes: Option<Vec<f64>>,
        r2: Option<Vec<f64>>,
        fit_range: Option<[usize; 2]>,
        elapsed_ms: Option<u64>,
        version: Option<String>,
    }
    serde_json::from_value::<Partial>(single).map(|_| ()).map_err(|_| Error::Schema {
        field: field.to_string(),
    })
}
