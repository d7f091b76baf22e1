//! Command results and their table, JSON and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

/// Environment variable holding the number of significant digits.
pub const PRECISION_ENV: &str = "PTAIL_PRECISION";
pub const DEFAULT_PRECISION: usize = 15;
pub const MIN_PRECISION: usize = 12;
pub const MAX_PRECISION: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Significant digits from [`PRECISION_ENV`], clamped to 12..=17.
pub fn precision_from_env() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(DEFAULT_PRECISION, |p| p.clamp(MIN_PRECISION, MAX_PRECISION))
}

/// Formats `v` with `digits` significant digits, plain decimal for moderate
/// magnitudes and scientific otherwise. Trailing zeros are dropped.
pub fn format_number(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Scalar {
    pub fn render(&self, digits: usize) -> String {
        match self {
            Scalar::Num(v) => format_number(*v, digits),
            Scalar::Int(v) => v.to_string(),
            Scalar::Bool(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }

    fn to_json(&self, digits: usize) -> Value {
        match self {
            Scalar::Num(v) if v.is_finite() => {
                let n: Number = format_number(*v, digits).parse().expect("formatted number is valid JSON");
                Value::Number(n)
            }
            Scalar::Num(v) => Value::String(format_number(*v, digits)),
            Scalar::Int(v) => Value::from(*v),
            Scalar::Bool(v) => Value::Bool(*v),
            Scalar::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Num(v)
    }
}

impl From<u64> for Scalar {
    fn from(v: u64) -> Self {
        Scalar::Int(v)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_string())
    }
}

impl From<String> for Scalar {
    fn from(v: String) -> Self {
        Scalar::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Scalar>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Scalar>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command reports, independent of the output format.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: Vec<(String, Scalar)>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

impl OutputEnvelope {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn result(&mut self, label: &str, value: impl Into<Scalar>) {
        self.results.push((label.into(), value.into()));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn get(&self, label: &str) -> Option<&Scalar> {
        self.results.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format, digits: usize) -> String {
        match format {
            Format::Table => self.to_table(digits),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(digits)).expect("JSON serialization");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(digits),
        }
    }

    pub fn to_json(&self, digits: usize) -> Value {
        let results: Vec<Value> =
            self.results.iter().map(|(l, v)| json!({ "label": l, "value": v.to_json(digits) })).collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> =
                    t.rows.iter().map(|r| Value::Array(r.iter().map(|c| c.to_json(digits)).collect())).collect();
                json!({ "name": t.name, "columns": t.columns, "rows": rows })
            })
            .collect();
        let parameters: Map<String, Value> =
            self.parameters.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        json!({
            "command": self.command,
            "parameters": parameters,
            "results": results,
            "tables": tables,
            "warnings": self.warnings,
        })
    }

    fn to_table(&self, digits: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        if !self.results.is_empty() {
            out.push('\n');
            let width = self.results.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
            for (l, v) in &self.results {
                let _ = writeln!(out, "{l:<width$}  {}", v.render(digits));
            }
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|c| c.render(digits)).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|i| cells.iter().map(|r| r[i].len()).chain([t.columns[i].len()]).max().unwrap_or(0))
                .collect();
            let line = |row: &[String]| {
                row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        if !self.warnings.is_empty() {
            out.push('\n');
            for w in &self.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        out
    }

    fn to_csv(&self, digits: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command={}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "# {k}={v}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        let mut block = |header: Vec<String>, rows: Vec<Vec<String>>| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory CSV");
            for r in rows {
                w.write_record(&r).expect("in-memory CSV");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV"));
        };
        block(
            vec!["label".into(), "value".into()],
            self.results.iter().map(|(l, v)| vec![l.clone(), v.render(digits)]).collect(),
        );
        for t in &self.tables {
            block(vec![format!("# table {}", t.name)], Vec::new());
            block(t.columns.clone(), t.rows.iter().map(|r| r.iter().map(|c| c.render(digits)).collect()).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.5, 15), "0.5");
        assert_eq!(format_number(0.3710224072481361, 15), "0.371022407248136");
        assert_eq!(format_number(1.234e-20, 12), "1.234e-20");
        assert_eq!(format_number(-2.0, 15), "-2");
        assert_eq!(format_number(123456.789, 12), "123456.789");
        assert_eq!(format_number(f64::INFINITY, 15), "inf");
        assert_eq!(format_number(0.0, 15), "0");
    }

    #[test]
    fn formatted_numbers_round_trip_to_the_stated_digits() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 2.5e-300, 6.02e23, 0.00012345678901234] {
            for digits in MIN_PRECISION..=MAX_PRECISION {
                let back: f64 = format_number(v, digits).parse().unwrap();
                assert!((back - v).abs() <= v.abs() * 10f64.powi(1 - digits as i32), "{v} at {digits}");
            }
            assert_eq!(format_number(v, 17).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_keeps_printed_digits() {
        let mut e = OutputEnvelope::new("t");
        e.result("v", 0.1f64 + 0.2);
        e.result("bad", f64::INFINITY);
        let v: Value = serde_json::from_str(&e.render(Format::Json, 12)).unwrap();
        assert_eq!(v["results"][0]["value"].to_string(), "0.3");
        assert_eq!(v["results"][1]["value"], "inf");
    }

    #[test]
    fn csv_quotes_fields() {
        let mut e = OutputEnvelope::new("t");
        e.result("note", "a, b");
        let text = e.render(Format::Csv, 12);
        assert!(text.contains("note,\"a, b\""));
    }
}
