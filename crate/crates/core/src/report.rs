//! Rendering of command reports as JSON, CSV or aligned text.
//!
//! Reports are built as `serde_json::Value` so the three formats share one
//! key order. Floats are written with 17 significant digits, which is exact
//! for `f64`, so emitted JSON re-renders to identical bytes.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::InvalidParameter(format!(
                "unknown format `{other}` (expected json, csv or text)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

/// 17 significant digits, trailing zeros dropped. Plain decimal for
/// decimal exponents in `[-20, 20]`, scientific outside.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0" } else { "0.0" }.into();
    }
    let sci = format!("{:.16e}", v.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mut digits: String = mant.chars().filter(|c| *c != '.').collect();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let sign = if v < 0.0 { "-" } else { "" };
    if !(-20..=20).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        return format!("{sign}{head}.{tail}e{exp}");
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            let pad = "0".repeat(int_len - digits.len());
            format!("{sign}{digits}{pad}.0")
        } else {
            let (i, f) = digits.split_at(int_len);
            format!("{sign}{i}.{f}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

/// Compact JSON with the fixed float format.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize report: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize to JSON")
}

/// A summary object plus an optional table of uniform rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub summary: Map<String, Value>,
    pub table: Option<Vec<Value>>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn field(mut self, key: &str, value: impl Serialize) -> Self {
        self.summary.insert(key.to_string(), to_value(&value));
        self
    }

    /// Appends the fields of a serializable struct.
    pub fn extend(mut self, value: impl Serialize) -> Self {
        if let Value::Object(m) = to_value(&value) {
            self.summary.extend(m);
        }
        self
    }

    pub fn with_table(mut self, rows: Vec<Value>) -> Self {
        self.table = Some(rows);
        self
    }

    /// JSON: the summary with the table under `rows`. CSV: the table, or the
    /// summary as a single row. Text: `key: value` lines then the table.
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut obj = self.summary.clone();
                if let Some(t) = &self.table {
                    obj.insert("rows".into(), Value::Array(t.clone()));
                }
                let mut s = to_json(&Value::Object(obj))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => match &self.table {
                Some(t) => render_csv(t),
                None => render_csv(&[Value::Object(self.summary.clone())]),
            },
            Format::Text => {
                let mut out = String::new();
                let width = self.summary.keys().map(|k| k.len()).max().unwrap_or(0);
                for (k, v) in &self.summary {
                    out.push_str(&format!("{k:<width$}  {}\n", cell(v)));
                }
                if let Some(t) = &self.table {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    out.push_str(&render_text_table(t));
                }
                Ok(out)
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if !(n.is_i64() || n.is_u64()) => format_f64(f),
            _ => n.to_string(),
        },
        other => to_json(other).unwrap_or_default(),
    }
}

fn columns(rows: &[Value]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    cols
}

fn render_csv(rows: &[Value]) -> Result<String> {
    let cols = columns(rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&cols).map_err(io_err)?;
    for r in rows {
        let rec: Vec<String> = cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect();
        w.write_record(&rec).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells"))
}

fn render_text_table(rows: &[Value]) -> String {
    let cols = columns(rows);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: &[String]| {
        let mut s = items
            .iter()
            .zip(&widths)
            .map(|(x, w)| format!("{x:>w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.push('\n');
        s
    };
    let mut out = line(&cols);
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_f64(1.0), "1.0");
        assert_eq!(format_f64(std::f64::consts::FRAC_PI_2), "1.5707963267948966");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(-2.5e-3), "-0.0025000000000000001");
        assert_eq!(format_f64(1e21), "1.0e21");
        assert_eq!(format_f64(123456.0), "123456.0");
        assert_eq!(format_f64(3.0e-300), "3.0000000000000002e-300");
        for v in [0.1, 1.0 / 3.0, 9.0, 4.5e-21, 6.02e23, 2.0f64.sqrt(), f64::MIN_POSITIVE, f64::MAX] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_round_trips_byte_for_byte() {
        let r = Report::new()
            .field("lambda", 1.0 / 3.0)
            .field("optimal_r", 7usize)
            .field("regime", "lower")
            .field("citation", Option::<String>::None)
            .with_table(vec![serde_json::json!({"n": 10, "v": 0.1})]);
        let s = r.render(Format::Json).unwrap();
        let parsed: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(to_json(&parsed).unwrap() + "\n", s);
        assert!(s.starts_with("{\"lambda\":0.33333333333333331,\"optimal_r\":7"));
    }

    #[test]
    fn csv_and_text_share_key_order() {
        let r = Report::new().field("b", 2.0).field("a", "x");
        assert_eq!(r.render(Format::Csv).unwrap(), "b,a\n2.0,x\n");
        assert_eq!(r.render(Format::Text).unwrap(), "b  2.0\na  x\n");
    }
}
