//! Diagnostics CSV: fixed header, `#` comment lines, 17 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::record::DiagnosticsRecord;

pub const HEADER: &str =
    "t,E_high,E_mid,E_low,sup_P0,sup_Pgt0,gauge_residual,B_norm,C_norm,D_norm,slab_fraction,null_ratio";

pub fn format_row(r: &DiagnosticsRecord) -> String {
    r.values().iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

/// Append-only writer; every row is flushed as soon as it is written.
pub struct CsvWriter {
    out: BufWriter<File>,
    path: std::path::PathBuf,
}

impl CsvWriter {
    pub fn create(path: &Path, comments: &[String]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = CsvWriter {
            out: BufWriter::new(file),
            path: path.to_path_buf(),
        };
        for c in comments {
            w.line(&format!("# {c}"))?;
        }
        w.line(HEADER)?;
        Ok(w)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }

    pub fn append(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        self.line(&format_row(r))
    }
}

/// Column names and columns of a numeric CSV with `#` comments.
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Csv(format!("no column named {name:?} (have {})", self.names.join(","))))
    }

    pub fn records(&self) -> Result<Vec<DiagnosticsRecord>> {
        let names: Vec<&str> = HEADER.split(',').collect();
        let cols: Vec<&[f64]> = names.iter().map(|n| self.column(n)).collect::<Result<_>>()?;
        let rows = cols[0].len();
        Ok((0..rows)
            .map(|i| {
                let mut v = [0.0; 12];
                for (k, c) in cols.iter().enumerate() {
                    v[k] = c[i];
                }
                DiagnosticsRecord::from_values(&v)
            })
            .collect())
    }
}

pub fn parse_table(text: &str) -> Result<Table> {
    let mut names: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match &names {
            None => {
                let n: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
                columns = vec![Vec::new(); n.len()];
                names = Some(n);
            }
            Some(n) => {
                let vals: Vec<&str> = line.split(',').collect();
                if vals.len() != n.len() {
                    return Err(Error::Csv(format!(
                        "line {}: {} fields, header has {}",
                        no + 1,
                        vals.len(),
                        n.len()
                    )));
                }
                for (c, v) in columns.iter_mut().zip(vals) {
                    let x: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Csv(format!("line {}: bad number {v:?}", no + 1)))?;
                    c.push(x);
                }
            }
        }
    }
    let names = names.ok_or_else(|| Error::Csv("missing header".into()))?;
    Ok(Table { names, columns })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    for line in BufReader::new(file).lines() {
        text.push_str(&line.map_err(|e| Error::io(path, e))?);
        text.push('\n');
    }
    parse_table(&text)
}
