//! Record streams rendered as CSV (17 significant digits) or JSON.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<i8> for Cell {
    fn from(x: i8) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Text(String::new()), Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) if s.is_empty() => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// One output row; field order is preserved in both formats.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record(Vec<(&'static str, Cell)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Cell>) -> Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().map(|(k, _)| *k)
    }
}

pub fn write_records<W: Write>(out: W, format: Format, records: &[Record]) -> Result<()> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                wtr.write_record(first.keys())?;
            }
            for rec in records {
                wtr.write_record(rec.0.iter().map(|(_, v)| v.csv()))?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|rec| {
                    let obj: Map<String, Value> =
                        rec.0.iter().map(|(k, v)| ((*k).to_owned(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
