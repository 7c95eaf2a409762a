//! Tabular output rendered as CSV or JSON.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One cell of a table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    /// A quantity that does not exist for this record (empty in CSV, `null`
    /// in JSON).
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
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

/// Whether JSON output is a single object or an array of objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Record,
    Rows,
}

/// A rectangular table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    shape: Shape,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            shape: Shape::Rows,
        }
    }

    /// A single-row table from `(column, value)` pairs, rendered as a JSON
    /// object rather than an array.
    pub fn record<S: Into<String>>(fields: impl IntoIterator<Item = (S, Cell)>) -> Self {
        let (columns, row): (Vec<String>, Vec<Cell>) =
            fields.into_iter().map(|(k, v)| (k.into(), v)).unzip();
        Table { columns, rows: vec![row], shape: Shape::Record }
    }

    /// Appends a row. Panics if its length differs from the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row length must match header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_cell))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    pub fn to_json(&self) -> io::Result<Vec<u8>> {
        let objects: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Json> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(json_cell))
                    .collect();
                Json::Object(map)
            })
            .collect();
        let mut out = match (self.shape, objects.len()) {
            (Shape::Record, 1) => to_json_bytes(&objects[0])?,
            _ => to_json_bytes(&Json::Array(objects))?,
        };
        out.push(b'\n');
        Ok(out)
    }
}

/// Serializes `value` with floats written to 17 significant digits.
pub fn to_json_bytes<T: Serialize>(value: &T) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    Ok(out)
}

struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", json_number(value))
    }
}

/// `x` with 17 significant digits in scientific notation, enough to
/// round-trip any double.
pub fn json_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_cell(c: &Cell) -> Json {
    match c {
        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Cell::Int(i) => Json::from(*i),
        Cell::Text(s) => Json::from(s.as_str()),
        Cell::Bool(b) => Json::Bool(*b),
        Cell::Missing => Json::Null,
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => csv_number(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

const CSV_DIGITS: usize = 12;

/// `x` with 12 significant digits and trailing zeros removed; scientific
/// notation when the decimal exponent is at least 6 in magnitude.
pub fn csv_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // the exponent after rounding to the target precision
    let sci = format!("{:.*e}", CSV_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp.abs() >= 6 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (CSV_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers() {
        assert_eq!(csv_number(0.0), "0");
        assert_eq!(csv_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(csv_number(0.6), "0.6");
        assert_eq!(csv_number(-2.5), "-2.5");
        assert_eq!(csv_number(123456.0), "123456");
        assert_eq!(csv_number(999999.9999999), "1e6");
        assert_eq!(csv_number(1.2e19), "1.2e19");
        assert_eq!(csv_number(9.375e16), "9.375e16");
        assert_eq!(csv_number(2.93474e-3), "0.00293474");
        assert_eq!(csv_number(1e-6), "1e-6");
        assert_eq!(csv_number(-1.5e-10), "-1.5e-10");
        for x in [0.1, 7.0 / 9.0, 12.5, 3e-5, 6.02e23] {
            let back: f64 = csv_number(x).parse().unwrap();
            assert!((back - x).abs() <= 1e-11 * x.abs());
        }
    }

    #[test]
    fn json_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 5.596e31, -1e-300, f64::MAX] {
            let back: f64 = json_number(x).parse().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn tables_render() {
        let mut t = Table::new(["name", "x", "ok"]);
        t.push(vec!["a,b".into(), 0.5.into(), true.into()]);
        t.push(vec!["c".into(), Cell::Missing, false.into()]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "name,x,ok\n\"a,b\",0.5,true\nc,,false\n");
        let json: serde_json::Value = serde_json::from_slice(&t.to_json().unwrap()).unwrap();
        assert_eq!(json[0]["x"], 0.5);
        assert!(json[1]["x"].is_null());

        let r = Table::record([("mode", Cell::from("paper")), ("re", 1.5.into())]);
        let text = String::from_utf8(r.to_json().unwrap()).unwrap();
        assert_eq!(text, "{\"mode\":\"paper\",\"re\":1.5000000000000000e0}\n");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        Table::new(["a", "b"]).push(vec![1.0.into()]);
    }
}
