//! Reports: one JSON block for machines and aligned tables for people.

use serde_json::{Map, Value};

use crate::function::FunctionOnSpace;
use crate::measure::Prob;
use crate::rational::{display_rational, format_rational, Rational};
use crate::space::SubsetMask;

pub fn rational(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

pub fn rationals<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::Array(values.into_iter().map(rational).collect())
}

pub fn prob(p: &Prob) -> Value {
    rationals(p.mass())
}

pub fn function(f: &FunctionOnSpace) -> Value {
    rationals(f.values())
}

pub fn set(mask: SubsetMask) -> Value {
    Value::Array(mask.points().map(Value::from).collect())
}

/// Text form of a rational vector for tables: `(1/2, 0, 1/2)`.
pub fn tuple<'a>(values: impl IntoIterator<Item = &'a Rational>) -> String {
    let parts: Vec<String> = values.into_iter().map(display_rational).collect();
    format!("({})", parts.join(", "))
}

/// A titled table with left-aligned columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    title: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    /// A two-column property/value table.
    pub fn properties(title: &str) -> Self {
        Self::new(title, &["property", "value"])
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        assert_eq!(cells.len(), self.headers.len(), "row width differs from the header");
        self.rows.push(cells);
        self
    }

    pub fn entry(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.row(vec![key.to_string(), value.to_string()])
    }

    fn render(&self, out: &mut String) {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> =
                cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
            padded.join("  ").trim_end().to_string()
        };
        out.push_str(&self.title);
        out.push('\n');
        out.push_str(&line(&self.headers));
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
    }
}

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The input was valid but the system fails a requirement of the command.
    Precondition,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::Precondition => 2,
        }
    }
}

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Map<String, Value>,
    pub tables: Vec<Table>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), Value::from(command));
        Self { json, tables: Vec::new(), status: Status::Success }
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.json.insert(key.into(), value.into());
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    /// Records a failed requirement without aborting the report.
    pub fn fail(&mut self, message: impl ToString) {
        self.status = Status::Precondition;
        let message = Value::String(message.to_string());
        match self.json.get_mut("failures") {
            Some(Value::Array(list)) => list.push(message),
            _ => {
                self.json.insert("failures".into(), Value::Array(vec![message]));
            }
        }
    }

    /// The JSON block, then a blank line and the tables unless suppressed.
    pub fn render(&self, json_only: bool) -> String {
        let mut json = self.json.clone();
        json.insert(
            "status".into(),
            Value::from(match self.status {
                Status::Success => "ok",
                Status::Precondition => "failed",
            }),
        );
        let mut out = String::new();
        write_json(&Value::Object(json), 0, &mut out);
        out.push('\n');
        if !json_only {
            for table in &self.tables {
                out.push('\n');
                table.render(&mut out);
            }
        }
        out
    }
}

/// Pretty JSON with arrays of scalars kept on one line.
fn write_json(value: &Value, indent: usize, out: &mut String) {
    let pad = |level: usize| "  ".repeat(level);
    let scalar = |v: &Value| !matches!(v, Value::Array(_) | Value::Object(_));
    match value {
        Value::Array(items) if items.iter().all(scalar) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push_str(&format!("[{}]", parts.join(", ")));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&format!("{}{}: ", pad(indent + 1), Value::String(key.clone())));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
