use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON document per command.
    Structured,
    /// A single table with a header row.
    Csv,
}

/// A violated inequality, reported with both sides.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub k: Option<usize>,
    pub l: Option<u32>,
    pub lhs: f64,
    pub rhs: f64,
}

/// One command's output: a structured document and a flat table.
pub struct Report {
    command: &'static str,
    fields: Map<String, Value>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    violations: Vec<Violation>,
    checked: bool,
}

impl Report {
    pub fn new(command: &'static str, header: &[&str]) -> Self {
        Self {
            command,
            fields: Map::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            violations: Vec::new(),
            checked: false,
        }
    }

    /// Marks the command as a check: violations make it exit with status 3.
    pub fn checked(mut self) -> Self {
        self.checked = true;
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.fields.insert(key.to_owned(), v);
    }

    pub fn extend_header(&mut self, extra: impl IntoIterator<Item = String>) {
        self.header.extend(extra);
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn violate(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn failed(&self) -> bool {
        self.checked && !self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn emit(&self, format: Format, out: &mut impl Write) -> Result<(), CliError> {
        match format {
            Format::Structured => {
                let mut doc = self.fields.clone();
                doc.insert("command".into(), json!(self.command));
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.header.iter().cloned().zip(r.iter().map(|c| cell_value(c))).collect()))
                    .collect();
                doc.insert("rows".into(), Value::Array(rows));
                if self.checked {
                    doc.insert("holds".into(), json!(self.violations.is_empty()));
                    doc.insert("violations".into(), serde_json::to_value(&self.violations).unwrap());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc)).map_err(|e| match e.io_error_kind() {
                    Some(kind) => CliError::from(std::io::Error::from(kind)),
                    None => CliError::Output(e.to_string()),
                })?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

// Numbers and booleans keep their type in the structured document.
fn cell_value(c: &str) -> Value {
    if let Ok(b) = c.parse::<bool>() {
        return json!(b);
    }
    if let Ok(i) = c.parse::<i64>() {
        return json!(i);
    }
    match c.parse::<f64>() {
        Ok(x) if x.is_finite() => json!(x),
        _ => json!(c),
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
