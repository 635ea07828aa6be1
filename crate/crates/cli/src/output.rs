use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// One printed value. `Money` gets thousands grouping in table mode; every
/// number is written at full precision in csv and json.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Money(f64),
    Real(f64),
    Count(usize),
    Text(String),
    Bool(bool),
    Missing,
}

impl Field {
    fn table(&self) -> String {
        match self {
            Field::Money(x) => group_thousands(*x),
            Field::Real(x) => compact(*x),
            Field::Count(n) => n.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => "-".into(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Field::Money(x) | Field::Real(x) => full_precision(*x),
            Field::Count(n) => n.to_string(),
            Field::Text(s) => s.clone(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Money(x) | Field::Real(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Field::Count(n) => Value::from(*n),
            Field::Text(s) => Value::from(s.as_str()),
            Field::Bool(b) => Value::from(*b),
            Field::Missing => Value::Null,
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn full_precision(x: f64) -> String {
    format!("{x:?}")
}

/// `1234567.891` as `1,234,567.891`: at most four decimals, trailing zeros dropped.
pub fn group_thousands(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let text = trim_fraction(format!("{:.4}", x.abs()));
    let (int, frac) = text.split_once('.').map_or((text.as_str(), ""), |(i, f)| (i, f));
    let mut grouped = String::new();
    for (i, ch) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let sign = if x < 0.0 && text.chars().any(|c| c != '0' && c != '.') { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{grouped}")
    } else {
        format!("{sign}{grouped}.{frac}")
    }
}

/// Seven significant digits, switching to exponent form outside `[1e-4, 1e9)`.
pub fn compact(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        trim_fraction(format!("{:.*}", (6 - mag).max(0) as usize, x))
    } else {
        let text = format!("{x:.6e}");
        let (mantissa, exp) = text.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    /// A single record, printed vertically in table mode and as an object in json.
    pub fn record(fields: Vec<(&'static str, Field)>) -> Self {
        let (headers, row) = fields.into_iter().unzip();
        Self { headers, rows: vec![row] }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Table if self.rows.len() == 1 => self.write_vertical(out),
            Format::Table => self.write_columns(out),
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let value = if self.rows.len() == 1 {
                    self.json_row(&self.rows[0])
                } else {
                    Value::Array(self.rows.iter().map(|r| self.json_row(r)).collect())
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&value)?)
            }
        }
    }

    fn json_row(&self, row: &[Field]) -> Value {
        let map: Map<String, Value> = self.headers.iter().zip(row).map(|(h, f)| (h.to_string(), f.json())).collect();
        Value::Object(map)
    }

    fn write_vertical(&self, out: &mut impl Write) -> io::Result<()> {
        let width = self.headers.iter().map(|h| h.len()).max().unwrap_or(0);
        for (h, f) in self.headers.iter().zip(&self.rows[0]) {
            writeln!(out, "{h:<width$}  {}", f.table())?;
        }
        Ok(())
    }

    fn write_columns(&self, out: &mut impl Write) -> io::Result<()> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Field::table).collect()).collect();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|j| cells.iter().map(|r| r[j].len()).chain([self.headers[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |items: Vec<&str>| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.headers.clone()))?;
        for row in &cells {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Field::csv))?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(group_thousands(2.2e14), "220,000,000,000,000");
        assert_eq!(group_thousands(149.9875), "149.9875");
        assert_eq!(group_thousands(6991537.254552113), "6,991,537.2546");
        assert_eq!(group_thousands(-1234.5), "-1,234.5");
        assert_eq!(group_thousands(999.99999), "1,000");
        assert_eq!(group_thousands(0.0), "0");
    }

    #[test]
    fn compact_form() {
        assert_eq!(compact(0.9266666666666667), "0.9266667");
        assert_eq!(compact(5.4509068671981), "5.450907");
        assert_eq!(compact(1e-5), "1e-5");
        assert_eq!(compact(1.6540785678570066e-8), "1.654079e-8");
        assert_eq!(compact(2.2e14), "2.2e14");
        assert_eq!(compact(-0.11), "-0.11");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1, 1e-9, 2.2e14, 149.98750000052083, 1.0 / 3.0] {
            assert_eq!(full_precision(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["inv_p", "value"]);
        t.push(vec![Field::Real(1e9), Field::Money(2180447.3991905478)]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "inv_p,value\n1000000000.0,2180447.399190548\n");
    }
}
