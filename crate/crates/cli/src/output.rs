use std::fs::File;
use std::io::{self, Write};

use serde_json::Value;

use crate::{CliError, CliResult, Format, GlobalOpts};

/// Rows for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A command result in both output shapes, plus a verification failure that
/// turns into exit code 3 after the output is written.
#[derive(Debug)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    pub failure: Option<String>,
}

impl Report {
    pub fn ok(json: Value, table: Table) -> Self {
        Self { json, table, failure: None }
    }

    pub fn emit(&self, g: &GlobalOpts) -> CliResult<()> {
        let mut out: Box<dyn Write> = match &g.output {
            Some(path) => Box::new(File::create(path).map_err(|e| {
                CliError::Input(format!("cannot create {}: {e}", path.display()))
            })?),
            None => Box::new(io::stdout().lock()),
        };
        let written = match g.format {
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.json).expect("JSON value serializes");
                writeln!(out, "{text}").and_then(|_| out.flush())
            }
            Format::Csv => write_csv(out, &self.table).map_err(io::Error::from),
        };
        match written {
            // A closed reader (e.g. `| head`) is not an error.
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                return Err(CliError::Input(format!("write failed: {e}")));
            }
            _ => {}
        }
        Ok(())
    }
}

fn write_csv(out: Box<dyn Write>, table: &Table) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.headers)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip text for a float, switching to exponent form for
/// very small or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}").to_lowercase()
}
