//! Tabular results with a provenance header, emitted as CSV (9 significant
//! digits) or JSON (12 significant digits).

use std::io::Write;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Run description written ahead of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub command: String,
    pub alpha: f64,
    pub units: String,
    pub tolerances: Vec<(&'static str, f64)>,
    pub params: Vec<(String, String)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn sig(v: f64, digits: usize) -> String {
    format!("{v:.prec$e}", prec = digits - 1)
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => sig(*v, 9),
        Cell::Num(v) => v.to_string(),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

/// `v` rounded to 12 significant digits; non-finite values become null.
fn json_num(v: f64) -> Value {
    sig(v, 12)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => json_num(*v),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Bool(b) => Value::from(*b),
        Cell::Missing => Value::Null,
    }
}

fn header_line(h: &Header) -> String {
    let tol: Vec<String> = h.tolerances.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
    let params: Vec<String> = h.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "# unitary-dirac {} command={} alpha={} units={} params={} tolerances={}",
        env!("CARGO_PKG_VERSION"),
        h.command,
        sig(h.alpha, 12),
        h.units,
        params.join(";"),
        tol.join(";")
    )
}

pub fn write_csv<W: Write>(h: &Header, t: &Table, mut w: W) -> Result<(), CliError> {
    writeln!(w, "{}", header_line(h))?;
    for n in &h.notes {
        writeln!(w, "# {n}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&t.columns).map_err(csv_err)?;
    for row in &t.rows {
        out.write_record(row.iter().map(csv_cell)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn write_json<W: Write>(h: &Header, t: &Table, mut w: W) -> Result<(), CliError> {
    let mut head = Map::new();
    head.insert("program".into(), "unitary-dirac".into());
    head.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    head.insert("command".into(), h.command.as_str().into());
    head.insert("alpha".into(), json_num(h.alpha));
    head.insert("units".into(), h.units.as_str().into());
    head.insert(
        "params".into(),
        Value::Object(h.params.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect()),
    );
    head.insert(
        "tolerances".into(),
        Value::Object(h.tolerances.iter().map(|(k, v)| (k.to_string(), json_num(*v))).collect()),
    );
    head.insert("notes".into(), Value::from(h.notes.clone()));
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                t.columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), json_cell(v)))
                    .collect(),
            )
        })
        .collect();
    let mut root = Map::new();
    root.insert("header".into(), Value::Object(head));
    root.insert("rows".into(), Value::from(rows));
    serde_json::to_writer(&mut w, &Value::Object(root)).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            command: "test".into(),
            alpha: 1.0 / 137.035999084,
            units: "electron_mass".into(),
            tolerances: vec![("sigma1", 1e-12)],
            params: vec![("z".into(), "1".into())],
            notes: vec![],
        }
    }

    #[test]
    fn csv_has_header_and_nine_digits() {
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![Cell::Num(1.0 / 3.0), Cell::Text("a,b".into())]);
        t.push(vec![Cell::Missing, Cell::Int(3)]);
        let mut buf = Vec::new();
        write_csv(&header(), &t, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# unitary-dirac"));
        assert!(lines[0].contains("alpha=7.29735256928e-3"));
        assert_eq!(lines[1], "x,label");
        assert_eq!(lines[2], "3.33333333e-1,\"a,b\"");
        assert_eq!(lines[3], ",3");
    }

    #[test]
    fn json_rounds_to_twelve_digits() {
        let mut t = Table::new(&["x"]);
        t.push(vec![Cell::Num(1.0 / 3.0)]);
        t.push(vec![Cell::Num(f64::NAN)]);
        let mut buf = Vec::new();
        write_json(&header(), &t, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0]["x"].as_f64().unwrap(), 0.333333333333);
        assert!(v["rows"][1]["x"].is_null());
        assert_eq!(v["header"]["command"], "test");
    }
}
