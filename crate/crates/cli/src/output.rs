//! Artifact emission: JSON envelopes and CSV tables, every float rounded to
//! 12 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

pub const TOOL: &str = "witl";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits; the shortest representation of the
/// result is what gets printed.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(v) => format!("{}", round12(*v)),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, cell)| {
                        let v = match cell {
                            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
                            Cell::Int(x) => Value::from(*x),
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Empty => Value::Null,
                        };
                        (c.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// What a subcommand produced. Tables can be emitted as CSV or JSON;
/// documents only as JSON.
pub enum Payload {
    Document(Value),
    Table(Table),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn render(payload: &Payload, format: Format, config: &Value) -> String {
    match (payload, format) {
        (Payload::Table(t), Format::Csv) => {
            let mut out = String::new();
            let _ = writeln!(out, "# {TOOL} {VERSION}");
            let _ = writeln!(out, "# config {}", serde_json::to_string(config).unwrap_or_default());
            let _ = writeln!(out, "{}", t.columns.join(","));
            for row in &t.rows {
                let _ = writeln!(out, "{}", row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            }
            out
        }
        (payload, _) => {
            let mut result = match payload {
                Payload::Document(v) => v.clone(),
                Payload::Table(t) => t.to_json(),
            };
            round_value(&mut result);
            let env = serde_json::json!({
                "tool": TOOL,
                "version": VERSION,
                "config": config,
                "result": result,
            });
            let mut s = serde_json::to_string_pretty(&env).unwrap_or_default();
            s.push('\n');
            s
        }
    }
}

pub fn write(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
