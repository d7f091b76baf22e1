//! The comparison-curve CSV file.
//!
//! ```text
//! # n=3 b=3 beta=3 x_hat=2.63304474896573 y_hat=... z_hat=... beta_hat=2.66666666666667
//! x,q,thm1_upper,short_upper,exact_tail,region
//! 0.00533333333333333,0.0108...,...,below_y
//! ```

use std::io::{Read, Write};

use ptail_core::compare::{CrossoverSet, CurveSample, Region};

use crate::output::format_number;

pub const COLUMNS: [&str; 6] = ["x", "q", "thm1_upper", "short_upper", "exact_tail", "region"];
const HEADER_KEYS: [&str; 7] = ["n", "b", "beta", "x_hat", "y_hat", "z_hat", "beta_hat"];

/// Landmarks carried by the `#` header line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveHeader {
    pub n: u64,
    pub b: f64,
    pub beta: f64,
    pub x_hat: f64,
    pub y_hat: f64,
    pub z_hat: f64,
    pub beta_hat: f64,
}

impl From<&CrossoverSet> for CurveHeader {
    fn from(s: &CrossoverSet) -> Self {
        Self { n: s.n, b: s.b, beta: s.beta, x_hat: s.x_hat, y_hat: s.y_hat, z_hat: s.z_hat, beta_hat: s.beta_hat }
    }
}

impl CurveHeader {
    /// The region a given `x` falls in, from the header landmarks alone.
    pub fn region(&self, x: f64) -> Region {
        if x < self.y_hat {
            Region::BelowY
        } else if x <= self.x_hat {
            Region::YtoX
        } else {
            Region::AboveX
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CurveCsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },
}

fn schema<T>(line: u64, message: impl Into<String>) -> Result<T, CurveCsvError> {
    Err(CurveCsvError::Schema { line, message: message.into() })
}

pub fn write_curve<W: Write>(mut out: W, header: &CurveHeader, rows: &[CurveSample], digits: usize) -> std::io::Result<()> {
    let f = |v: f64| format_number(v, digits);
    writeln!(
        out,
        "# n={} b={} beta={} x_hat={} y_hat={} z_hat={} beta_hat={}",
        header.n,
        f(header.b),
        f(header.beta),
        f(header.x_hat),
        f(header.y_hat),
        f(header.z_hat),
        f(header.beta_hat)
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([f(r.x), f(r.q), f(r.thm1_upper), f(r.short_upper), f(r.exact_tail), r.region.id().into()])?;
    }
    w.flush()
}

fn parse_header(line: &str, number: u64) -> Result<CurveHeader, CurveCsvError> {
    let mut values = [None; 7];
    for token in line.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = token.split_once('=') else {
            return schema(number, format!("header token '{token}' is not key=value"));
        };
        let Some(i) = HEADER_KEYS.iter().position(|k| *k == key) else {
            continue;
        };
        match value.parse::<f64>() {
            Ok(v) => values[i] = Some(v),
            Err(_) => return schema(number, format!("header value for {key} is not a number")),
        }
    }
    for (k, v) in HEADER_KEYS.iter().zip(&values) {
        if v.is_none() {
            return schema(number, format!("header is missing {k}"));
        }
    }
    let v = values.map(|v| v.unwrap_or(f64::NAN));
    if v[0] < 1.0 || v[0].fract() != 0.0 {
        return schema(number, "header n must be a positive integer");
    }
    Ok(CurveHeader { n: v[0] as u64, b: v[1], beta: v[2], x_hat: v[3], y_hat: v[4], z_hat: v[5], beta_hat: v[6] })
}

/// Reads a curve file back, checking the header and column schema.
pub fn read_curve<R: Read>(mut input: R) -> Result<(CurveHeader, Vec<CurveSample>), CurveCsvError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        if !line.starts_with('#') {
            break;
        }
        if line.contains("x_hat=") {
            header = Some(parse_header(line, i as u64 + 1)?);
        }
    }
    let Some(header) = header else {
        return schema(1, "no '# n=... b=... beta=... x_hat=... y_hat=... z_hat=... beta_hat=...' header line");
    };
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = reader.headers().map_err(|e| CurveCsvError::Schema { line: 1, message: e.to_string() })?.clone();
    if columns.iter().ne(COLUMNS) {
        return schema(columns.position().map_or(1, |p| p.line()), format!("expected columns {}", COLUMNS.join(",")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CurveCsvError::Schema {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut v = [0.0; 5];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = match record[i].parse::<f64>() {
                Ok(x) => x,
                Err(_) => return schema(line, format!("column {} is not a number", COLUMNS[i])),
            };
        }
        let Some(region) = Region::from_id(&record[5]) else {
            return schema(line, format!("unknown region '{}'", &record[5]));
        };
        rows.push(CurveSample { x: v[0], q: v[1], thm1_upper: v[2], short_upper: v[3], exact_tail: v[4], region });
    }
    Ok((header, rows))
}
