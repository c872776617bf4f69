//! Tabular artifacts rendered as CSV or JSON.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::Format;

/// A table with a fixed header, plus an optional richer JSON document that
/// replaces the table in JSON output.
#[derive(Debug, Clone)]
pub struct Report {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    detail: Option<Value>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), rows: Vec::new(), detail: None }
    }

    /// One-column, one-row report.
    pub fn scalar(column: &'static str, value: impl Into<Value>) -> Self {
        let mut r = Report::new(&[column]);
        r.push(vec![value.into()]);
        r
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn with_detail(mut self, detail: &impl Serialize) -> Self {
        self.detail = Some(serde_json::to_value(detail).expect("serializable detail"));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let doc = self.detail.clone().unwrap_or_else(|| self.table_json());
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON value");
                s.push('\n');
                s
            }
        }
    }

    fn table_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => quote(s),
        other => quote(&other.to_string()),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Float cell; non-finite values become empty cells / `null`, and `-0` is
/// written as `0`.
pub fn num(x: f64) -> Value {
    let x = if x == 0.0 { 0.0 } else { x };
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
