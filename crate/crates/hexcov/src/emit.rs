//! Result tables and their CSV/JSON serializations. Cell values use
//! the shortest round-trip decimal form; the JSON document carries the
//! same table plus the metadata block.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Subcommand-specific scalars (exponent fit, KS verdicts, ...).
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(config: &RunConfig, subcommand: &str, columns: &[&str]) -> Self {
        Report {
            metadata: Metadata {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: subcommand.into(),
                config: config.clone(),
            },
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} {} {}\n",
            self.metadata.tool, self.metadata.version, self.metadata.subcommand
        ));
        out.push_str(&format!(
            "# config {}\n",
            serde_json::to_string(&self.metadata.config).expect("config serializes")
        ));
        for (k, v) in &self.extra {
            out.push_str(&format!("# {k} {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}"))),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// JSON number from an f64, with non-finite values mapped to null
/// (JSON has no inf/nan).
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}
