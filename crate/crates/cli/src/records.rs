use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One row of an experiment CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub method: String,
    /// `K` for the Chebyshev solver, number of steps on `(-1, 1)` for the
    /// steppers.
    pub param: usize,
    pub error: f64,
    /// PCG iterations; absent for the steppers.
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
}

pub const CSV_HEADER: &str = "method,param,error,iterations,wall_time_s";

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_csv<W: Write>(w: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = writer(w);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_file(path: &Path, records: &[ConvergenceRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), records)
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ConvergenceRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(CliError::Config(format!(
            "unexpected CSV header {:?}",
            header.join(",")
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<ConvergenceRecord>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

/// Records of one method, in file order.
pub fn select<'a>(records: &'a [ConvergenceRecord], method: &str) -> Vec<&'a ConvergenceRecord> {
    records.iter().filter(|r| r.method == method).collect()
}
