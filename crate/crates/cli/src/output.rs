//! Result tables and their renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;

const SIGNIFICANT: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Must lie in `[0, 1]`.
    Probability,
    Quantity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub value: f64,
    /// Library operation that produced the value.
    pub operation: &'static str,
    pub kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<Row>,
    pub metadata: BTreeMap<String, String>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    fn push(&mut self, label: String, value: f64, operation: &'static str, kind: Kind) -> Result<(), CliError> {
        if !value.is_finite() {
            return Err(CliError::Numeric(format!("{label} = {value} is not finite")));
        }
        if kind == Kind::Probability && !(0.0..=1.0).contains(&value) {
            return Err(CliError::Numeric(format!("{label} = {value} outside [0, 1]")));
        }
        self.rows.push(Row {
            label,
            value,
            operation,
            kind,
        });
        Ok(())
    }

    pub fn probability(&mut self, label: impl Into<String>, value: f64, operation: &'static str) -> Result<(), CliError> {
        self.push(label.into(), value, operation, Kind::Probability)
    }

    pub fn quantity(&mut self, label: impl Into<String>, value: f64, operation: &'static str) -> Result<(), CliError> {
        self.push(label.into(), value, operation, Kind::Quantity)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.label == label).map(|r| r.value)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,value,operation\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", csv_field(&r.label), format_value(r.value), r.operation);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let values: Vec<String> = self.rows.iter().map(|r| format_value(r.value)).collect();
        let lw = self.rows.iter().map(|r| r.label.chars().count()).chain([5]).max().unwrap_or(5);
        let vw = values.iter().map(|v| v.len()).chain([5]).max().unwrap_or(5);
        let _ = writeln!(out, "{:<lw$}  {:>vw$}  operation", "label", "value");
        for (r, v) in self.rows.iter().zip(&values) {
            let _ = writeln!(out, "{:<lw$}  {:>vw$}  {}", r.label, v, r.operation);
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonRow<'a> {
            label: &'a str,
            value: f64,
            operation: &'a str,
        }
        #[derive(Serialize)]
        struct JsonTable<'a> {
            metadata: &'a BTreeMap<String, String>,
            rows: Vec<JsonRow<'a>>,
        }
        let rows = self
            .rows
            .iter()
            .map(|r| JsonRow {
                label: &r.label,
                value: format_value(r.value).parse().expect("formatted value parses"),
                operation: r.operation,
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&JsonTable {
            metadata: &self.metadata,
            rows,
        })
        .expect("table serializes");
        s.push('\n');
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Twelve significant digits; plain decimal for moderate magnitudes,
/// scientific otherwise.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let scientific = format!("{:.*e}", (SIGNIFICANT - 1) as usize, v);
    // Exponent after rounding, so 0.99999999999999 counts as 1.
    let exponent: i32 = scientific[scientific.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-6..12).contains(&exponent) {
        let decimals = (SIGNIFICANT - 1 - exponent) as usize;
        format!("{v:.decimals$}")
    } else {
        scientific
    }
}
