use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::{Format, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// A row that can also be written as a CSV record.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct Report<R> {
    pub schema_version: u32,
    pub config: RunConfig,
    pub notes: Vec<String>,
    pub rows: Vec<R>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl<R: Serialize + CsvRow> Report<R> {
    pub fn new(config: RunConfig, notes: Vec<String>, rows: Vec<R>, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report {
            schema_version: SCHEMA_VERSION,
            config,
            notes,
            rows,
            checks,
            pass,
        }
    }

    pub fn emit(&self) -> io::Result<()> {
        match &self.config.output {
            Some(path) => self.write(BufWriter::new(File::create(path)?)),
            None => self.write(io::stdout().lock()),
        }?;
        let mut err = io::stderr().lock();
        for note in &self.notes {
            writeln!(err, "note: {note}")?;
        }
        for c in &self.checks {
            writeln!(err, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }

    fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        match self.config.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, self)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(&mut w);
                out.write_record(R::header())?;
                for r in &self.rows {
                    out.write_record(r.fields())?;
                }
                out.flush()?;
            }
        }
        w.flush()
    }
}
