use std::io::Write;
use std::path::Path;

use crate::config::Units;
use crate::CliError;

/// One CSV field. `Info` values are mutual informations or rates and are
/// the only ones rescaled when bits are requested.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Info(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self, units: Units) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Info(x) => format_real(x * units.scale()),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, sink: W, units: Units) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(units)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes to `path`, or to stdout when there is none.
    pub fn emit(&self, path: Option<&Path>, units: Units) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let file = std::fs::File::create(p)
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
                self.write_to(std::io::BufWriter::new(file), units)
            }
            None => self.write_to(std::io::stdout().lock(), units),
        }
    }
}
