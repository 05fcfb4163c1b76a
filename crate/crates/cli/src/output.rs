//! Tabular output as CSV or as JSON records with a metadata header.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// CSV text. Floats carry 17 significant digits so they parse back exactly.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    program: &'static str,
    version: &'static str,
    command: &'a str,
    config: BTreeMap<&'static str, Value>,
}

#[derive(Serialize)]
struct Document<'a> {
    metadata: Metadata<'a>,
    records: Vec<Map<String, Value>>,
}

pub fn render(table: &Table, command: &str, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(&table.columns).map_err(fail)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv)).map_err(fail)?;
            }
            w.into_inner().map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Json => {
            let records = table
                .rows
                .iter()
                .map(|row| {
                    table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.to_json()))
                        .collect()
                })
                .collect();
            let doc = Document {
                metadata: Metadata {
                    program: "eprfw",
                    version: env!("CARGO_PKG_VERSION"),
                    command,
                    config: cfg.echo(),
                },
                records,
            };
            let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes to `out`, or to stdout when no path is set.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
