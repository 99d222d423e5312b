use std::io::Write;

use serde_json::Value;

use crate::error::CliError;

/// One CSV cell. Floats are written with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Io(e.into());
        out.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Table rows of the generic pass/fail schema shared by the check commands.
pub fn check_table() -> Table {
    Table::new(&[
        "check",
        "b",
        "lambda_re",
        "lambda_im",
        "value",
        "tolerance",
        "pass",
    ])
}

pub fn check_row(
    check: &str,
    b: Option<f64>,
    lambda: (f64, f64),
    value: f64,
    tol: f64,
) -> Vec<Cell> {
    vec![
        check.into(),
        b.map_or(Cell::S(String::new()), Cell::F),
        lambda.0.into(),
        lambda.1.into(),
        value.into(),
        tol.into(),
        (value <= tol).into(),
    ]
}

pub fn write_json<W: Write>(mut w: W, value: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        let s = Cell::F(0.1).render();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI * 1e-7;
        assert_eq!(Cell::F(x).render().parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_has_header() {
        let mut t = Table::new(&["b", "re", "im"]);
        t.push(vec![3.0.into(), 0.5.into(), (-1.0).into()]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("b,re,im"));
        assert_eq!(
            lines.next(),
            Some("3.0000000000000000e0,5.0000000000000000e-1,-1.0000000000000000e0")
        );
    }
}
