//! Plain-text artifacts. Tables are comma-separated with `#` header lines:
//!
//! ```text
//! # columns: t,J,stderr
//! # units: kick,momentum,momentum
//! # <key>: <value>        (optional metadata)
//! 0,0.0000000000000000e0,NaN
//! ```
//!
//! Floats carry 17 significant digits and a missing value is written `NaN`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::observables::{CurrentSeries, PhaseGrid};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing column {0}")]
    MissingColumn(String),
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_header<W: Write>(w: &mut W, columns: &[&str], units: &[&str], meta: &[(&str, String)]) -> io::Result<()> {
    writeln!(w, "# columns: {}", columns.join(","))?;
    writeln!(w, "# units: {}", units.join(","))?;
    for (k, v) in meta {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

/// `t, J, stderr`; the quantum engine leaves `stderr` as `NaN`.
pub fn write_current_csv<W: Write>(w: &mut W, series: &CurrentSeries, meta: &[(&str, String)]) -> io::Result<()> {
    write_header(w, &["t", "J", "stderr"], &["kick", "momentum", "momentum"], meta)?;
    for e in series.entries() {
        writeln!(w, "{},{},{}", e.t, fmt_float(e.current), fmt_float(e.stderr.unwrap_or(f64::NAN)))?;
    }
    Ok(())
}

/// `gamma, p`, one row per retained momentum.
pub fn write_bifurcation_csv<W: Write>(
    w: &mut W,
    gamma_grid: &[f64],
    samples: &[Vec<f64>],
    meta: &[(&str, String)],
) -> io::Result<()> {
    write_header(w, &["gamma", "p"], &["1", "momentum"], meta)?;
    for (g, ps) in gamma_grid.iter().zip(samples) {
        let g = fmt_float(*g);
        for p in ps {
            writeln!(w, "{g},{}", fmt_float(*p))?;
        }
    }
    Ok(())
}

/// What an asymptotic scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVariable {
    Gamma,
    Temperature,
}

impl ScanVariable {
    pub fn column(self) -> &'static str {
        match self {
            ScanVariable::Gamma => "gamma",
            ScanVariable::Temperature => "temperature",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            ScanVariable::Gamma => "1",
            ScanVariable::Temperature => "energy",
        }
    }
}

/// One point of an asymptotic scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub j_inf: f64,
    pub stderr: Option<f64>,
}

/// `gamma|temperature, J_inf, stderr`.
pub fn write_scan_csv<W: Write>(
    w: &mut W,
    variable: ScanVariable,
    points: &[ScanPoint],
    meta: &[(&str, String)],
) -> io::Result<()> {
    write_header(w, &[variable.column(), "J_inf", "stderr"], &[variable.unit(), "momentum", "momentum"], meta)?;
    for pt in points {
        writeln!(
            w,
            "{},{},{}",
            fmt_float(pt.value),
            fmt_float(pt.j_inf),
            fmt_float(pt.stderr.unwrap_or(f64::NAN))
        )?;
    }
    Ok(())
}

/// Portrait matrix: one row per momentum bin in ascending `p`, one column per
/// position bin. The window lives in the sidecar.
pub fn write_grid_csv<W: Write>(w: &mut W, grid: &PhaseGrid) -> io::Result<()> {
    writeln!(w, "# rows: p bins ascending, columns: x bins ascending")?;
    writeln!(w, "# units: density per unit phase-space area")?;
    for row in grid.rows() {
        let line: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Value in a `key = value` sidecar.
#[derive(Debug, Clone, PartialEq)]
pub enum MetaValue {
    Int(u64),
    Float(f64),
    Text(String),
}

/// Sidecar for a portrait matrix, written as `key = value` lines (valid TOML).
pub fn write_grid_sidecar<W: Write>(w: &mut W, grid: &PhaseGrid, extra: &[(&str, MetaValue)]) -> io::Result<()> {
    let win = &grid.window;
    writeln!(w, "x_bins = {}", win.x_bins)?;
    writeln!(w, "p_bins = {}", win.p_bins)?;
    writeln!(w, "x_min = 0.0")?;
    writeln!(w, "x_max = {}", fmt_float(std::f64::consts::TAU))?;
    writeln!(w, "p_min = {}", fmt_float(win.p_min))?;
    writeln!(w, "p_max = {}", fmt_float(win.p_max))?;
    for (k, v) in extra {
        match v {
            MetaValue::Int(i) => writeln!(w, "{k} = {i}")?,
            MetaValue::Float(f) => writeln!(w, "{k} = {}", fmt_float(*f))?,
            MetaValue::Text(s) => writeln!(w, "{k} = {s:?}")?,
        }
    }
    Ok(())
}

/// A parsed table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, OutputError> {
        let i = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| OutputError::MissingColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Reads any artifact in the table dialect, including portrait matrices
/// (which have no `columns` line).
pub fn read_table<R: BufRead>(r: R) -> Result<Table, OutputError> {
    let mut table = Table::default();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once(": ") {
                let split = || v.split(',').map(str::to_string).collect();
                match k {
                    "columns" => table.columns = split(),
                    "units" if !table.columns.is_empty() => table.units = split(),
                    _ => table.meta.push((k.to_string(), v.to_string())),
                }
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| OutputError::Parse { line: i + 1, message: e.to_string() })?;
        if !table.columns.is_empty() && row.len() != table.columns.len() {
            return Err(OutputError::Parse {
                line: i + 1,
                message: format!("expected {} fields, found {}", table.columns.len(), row.len()),
            });
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Reads a `t, J, stderr` table back into a series.
pub fn read_current_csv<R: BufRead>(r: R) -> Result<CurrentSeries, OutputError> {
    let table = read_table(r)?;
    let t = table.column("t")?;
    let j = table.column("J")?;
    let s = table.column("stderr")?;
    let mut series = CurrentSeries::new();
    for ((t, j), s) in t.into_iter().zip(j).zip(s) {
        series.push(t as u64, j, (!s.is_nan()).then_some(s));
    }
    Ok(series)
}
