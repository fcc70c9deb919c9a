//! Tabular reports and their three renderings.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Csv,
    Pretty,
}

/// A cell; floats keep full precision until rendering.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl Cell {
    /// 17 significant digits for floats.
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Float(v) if v.is_finite() => format!("{v:.6e}"),
            other => other.csv(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // JSON has no NaN or infinity
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// Everything a command produces.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub table: Table,
    /// scalar results that do not fit the row table
    pub summary: Vec<(&'static str, Cell)>,
}

impl Report {
    pub fn write<W: Write>(&self, output: Output, mut w: W) -> Result<()> {
        match output {
            Output::Json => {
                let mut doc = Map::new();
                doc.insert("schema".into(), json!(1));
                doc.insert("command".into(), json!(self.command));
                doc.insert("config".into(), self.config.clone());
                doc.insert("rows".into(), self.table.json_rows());
                if !self.summary.is_empty() {
                    let s: Map<String, Value> = self
                        .summary
                        .iter()
                        .map(|(k, v)| (k.to_string(), v.json()))
                        .collect();
                    doc.insert("summary".into(), Value::Object(s));
                }
                serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
                writeln!(w)?;
            }
            Output::Csv => {
                let mut cw = csv::Writer::from_writer(&mut w);
                cw.write_record(&self.table.columns)?;
                for r in &self.table.rows {
                    cw.write_record(r.iter().map(Cell::csv))?;
                }
                cw.flush()?;
            }
            Output::Pretty => {
                let cells: Vec<Vec<String>> = self
                    .table
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::pretty).collect())
                    .collect();
                let widths: Vec<usize> = self
                    .table
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(i, c)| cells.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
                    .collect();
                let line = |w: &mut W, vals: Vec<&str>| -> std::io::Result<()> {
                    let parts: Vec<String> = vals
                        .iter()
                        .zip(&widths)
                        .map(|(v, n)| format!("{v:>n$}"))
                        .collect();
                    writeln!(w, "{}", parts.join("  ").trim_end())
                };
                line(&mut w, self.table.columns.clone())?;
                for r in &cells {
                    line(&mut w, r.iter().map(String::as_str).collect())?;
                }
                for (k, v) in &self.summary {
                    writeln!(w, "{k}: {}", v.pretty())?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["a".into(), 0.1f64.into()]);
        t.push(vec!["b,c".into(), f64::NAN.into()]);
        Report {
            command: "test",
            config: json!({"q": 0.5}),
            table: t,
            summary: vec![("defect", 1e-9.into())],
        }
    }

    #[test]
    fn csv_has_header_and_17_digits() {
        let mut buf = Vec::new();
        sample().write(Output::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "name,value");
        assert_eq!(lines[1], "a,1.0000000000000001e-1");
        assert_eq!(lines[2], "\"b,c\",NaN");
        let back: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_is_versioned() {
        let mut buf = Vec::new();
        sample().write(Output::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["config"]["q"], 0.5);
        assert_eq!(v["rows"][0]["value"], 0.1);
        assert_eq!(v["rows"][1]["value"], "NaN");
        assert_eq!(v["summary"]["defect"], 1e-9);
    }

    #[test]
    fn pretty_aligns() {
        let mut buf = Vec::new();
        sample().write(Output::Pretty, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("defect: 1.000000e-9"));
        assert_eq!(s.lines().next().unwrap(), "name        value");
    }
}
