use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use biquat_core::maxwell::{write_field_csv, FieldRow};
use serde::Serialize;
use serde_json::Value;

/// One pass/fail comparison of a measured value against a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    /// Passes when `value < tolerance`; NaN never passes.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: Some(value),
            tolerance,
            passed: value < tolerance,
            error: None,
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, error: impl ToString) -> Self {
        Self {
            name: name.into(),
            value: None,
            tolerance,
            passed: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    pub inputs: Value,
    pub checks: Vec<CheckResult>,
    pub details: Value,
    pub outputs: Vec<String>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// A field map destined for `fields_<name>.csv`.
pub struct FieldMap {
    pub name: String,
    pub rows: Vec<FieldRow>,
}

impl FieldMap {
    pub fn file_name(&self) -> String {
        format!("fields_{}.csv", self.name)
    }
}

pub fn write_outputs(dir: &Path, report: &Report, maps: &[FieldMap]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for map in maps {
        let file = fs::File::create(dir.join(map.file_name()))?;
        let mut out = BufWriter::new(file);
        write_field_csv(&map.rows, &mut out)?;
        out.flush()?;
    }
    let mut out = BufWriter::new(fs::File::create(dir.join("report.json"))?);
    serde_json::to_writer_pretty(&mut out, report).map_err(io::Error::other)?;
    out.write_all(b"\n")?;
    out.flush()
}
