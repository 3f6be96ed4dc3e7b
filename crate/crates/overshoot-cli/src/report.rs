//! Report assembly and CSV/JSON emission.
//!
//! Reports are a pure function of (resolved config, seed): the only
//! non-reproducible content is the timestamp header, which lives on its own
//! line and can be suppressed.

use serde_json::{json, Value};
use std::io::Write;

use crate::CliError;

/// One report cell; reals are emitted with 17 significant digits in CSV and
/// as lossless JSON numbers.
#[derive(Debug, Clone)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Real(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Null => Value::Null,
        }
    }
}

/// 17 significant digits: enough for exact f64 round-trips.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub struct Report {
    /// Fully resolved configuration, recorded in the output header.
    pub config: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn emit(&self, format: Format, timestamp: Option<u64>, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.emit_csv(timestamp, out),
            Format::Json => self.emit_json(timestamp, out),
        }
    }

    fn emit_csv(&self, timestamp: Option<u64>, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "# config {}", self.config).map_err(io_err)?;
        if let Some(ts) = timestamp {
            writeln!(out, "# generated_at_unix {ts}").map_err(io_err)?;
        }
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.csv_field())).map_err(csv_err)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Numeric(format!("csv: {e}")))?;
        out.write_all(&body).map_err(io_err)?;
        Ok(())
    }

    fn emit_json(&self, timestamp: Option<u64>, out: &mut dyn Write) -> Result<(), CliError> {
        // serde_json maps are BTree-backed: key order is sorted, hence stable.
        let mut top = serde_json::Map::new();
        top.insert("config".into(), self.config.clone());
        if let Some(ts) = timestamp {
            top.insert("generated_at_unix".into(), json!(ts));
        }
        top.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).into(), cell.json_value());
                }
                Value::Object(obj)
            })
            .collect();
        top.insert("rows".into(), json!(rows));
        let text = serde_json::to_string_pretty(&Value::Object(top))
            .map_err(|e| CliError::Numeric(format!("json: {e}")))?;
        writeln!(out, "{text}").map_err(io_err)?;
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Numeric(format!("io: {e}"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Numeric(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -5.5e12] {
            let s = format_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let r = Report {
            config: json!({"command": "t"}),
            columns: vec!["a", "b"],
            rows: vec![vec![Cell::Text("x,y".into()), Cell::Int(1)]],
        };
        let mut buf = vec![];
        r.emit(Format::Csv, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"x,y\",1"), "{text}");
    }
}
