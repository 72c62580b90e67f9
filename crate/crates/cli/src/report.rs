use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub(crate) fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Data(format!("writing output: {e}"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

pub(crate) fn write_json(out: &mut dyn Write, doc: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(out).map_err(stdout_err)
}

pub(crate) fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<Value>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r.iter().map(cell)).map_err(err)?;
    }
    w.flush().map_err(stdout_err)
}

/// Left-aligned text columns separated by two spaces.
pub(crate) fn write_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<Value>]) -> Result<()> {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(cell).collect()).collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &cells {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |out: &mut dyn Write, r: &[String]| -> Result<()> {
        let parts: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).map_err(stdout_err)
    };
    line(out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>())?;
    for r in &cells {
        line(out, r)?;
    }
    Ok(())
}
