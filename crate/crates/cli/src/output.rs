// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Files written by the CLI.
//!
//! Floats are written in their shortest round-trip form, so reading a CSV
//! back yields the exact values that were computed.
//!
//! Slab fields are `x,phi` tables with a header. X-Y fields are headerless
//! heatmaps with one line per grid row; the first line is the bottom row
//! (`y` increasing downward through the file) and columns run left to right.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use randord_core::problem::{SlabGrid, XyGrid};
use randord_core::quadrature::Geometry;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn create(path: &Path) -> CliResult<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

/// Writes a table with a header row.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = create(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_slab_field(path: &Path, grid: &SlabGrid, phi: &[f64]) -> CliResult<()> {
    let rows = grid.nodes().into_iter().zip(phi).map(|(x, p)| vec![fmt(x), fmt(*p)]);
    write_table(path, &["x", "phi"], rows)
}

pub fn write_heatmap(path: &Path, grid: &XyGrid, values: &[f64]) -> CliResult<()> {
    let mut w = create(path)?;
    for row in values.chunks(grid.nx) {
        w.write_record(row.iter().map(|v| fmt(*v)))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_field(path: &Path, grid: &FieldGrid, values: &[f64]) -> CliResult<()> {
    match grid {
        FieldGrid::Slab(g) => write_slab_field(path, g, values),
        FieldGrid::Xy(g) => write_heatmap(path, g, values),
    }
}

/// Grayscale image of a heatmap, scaled from the field minimum (black) to
/// its maximum (white). Image rows run top to bottom as usual.
pub fn write_pgm(path: &Path, grid: &XyGrid, values: &[f64]) -> CliResult<()> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "P2\n{} {}\n255", grid.nx, grid.ny).map_err(io)?;
    for row in values.chunks(grid.nx).rev() {
        let line: Vec<String> = row
            .iter()
            .map(|v| (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0).to_string())
            .collect();
        writeln!(w, "{}", line.join(" ")).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Grid a field lives on, for reading and writing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldGrid {
    Slab(SlabGrid),
    Xy(XyGrid),
}

impl FieldGrid {
    pub fn geometry(&self) -> Geometry {
        match self {
            FieldGrid::Slab(_) => Geometry::Slab,
            FieldGrid::Xy(_) => Geometry::Xy,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FieldGrid::Slab(g) => g.node_count(),
            FieldGrid::Xy(g) => g.cell_count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn data_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Data {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_float(path: &Path, line: u64, s: &str) -> CliResult<f64> {
    s.trim()
        .parse()
        .map_err(|_| data_error(path, format!("line {line}: `{s}` is not a number")))
}

/// Reads a field written by [`write_field`] and checks it matches `grid`.
pub fn read_field(path: &Path, grid: &FieldGrid) -> CliResult<Vec<f64>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let slab = matches!(grid, FieldGrid::Slab(_));
    let mut r = csv::ReaderBuilder::new()
        .has_headers(slab)
        .flexible(true)
        .from_reader(file);
    let mut values = Vec::with_capacity(grid.len());
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        match grid {
            FieldGrid::Slab(_) => {
                let phi = record
                    .get(1)
                    .ok_or_else(|| data_error(path, format!("line {line}: expected `x,phi`")))?;
                values.push(parse_float(path, line, phi)?);
            }
            FieldGrid::Xy(g) => {
                if record.len() != g.nx {
                    return Err(data_error(
                        path,
                        format!("line {line}: expected {} values, got {}", g.nx, record.len()),
                    ));
                }
                for v in record.iter() {
                    values.push(parse_float(path, line, v)?);
                }
            }
        }
    }
    if values.len() != grid.len() {
        return Err(data_error(
            path,
            format!("expected {} values for the problem grid, got {}", grid.len(), values.len()),
        ));
    }
    Ok(values)
}

/// One line of `metrics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRow {
    pub t: usize,
    pub n: usize,
    pub error: f64,
    pub bias: f64,
    pub mean_variance: f64,
}

pub const METRICS_HEADER: [&str; 5] = ["t", "n", "error", "bias", "mean_variance"];

/// Appends a row, writing the header first if the file is new or empty.
pub fn append_metrics(path: &Path, row: &MetricsRow) -> CliResult<()> {
    let fresh = fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(METRICS_HEADER)?;
    }
    w.write_record([
        row.t.to_string(),
        row.n.to_string(),
        fmt(row.error),
        fmt(row.bias),
        fmt(row.mean_variance),
    ])?;
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Record of one run, written next to its outputs as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    /// Full configuration (after flag overrides), as TOML text; loading it
    /// with `--config` repeats the run.
    pub config: String,
    pub seed: Option<u64>,
    /// Where the reference solution came from, if one was used.
    pub reference: Option<String>,
    /// Source-iteration counts of the deterministic solves.
    pub iterations: Vec<usize>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<PathBuf>,
    /// Command-specific values such as fitted orders.
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: String) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            seed: None,
            reference: None,
            iterations: Vec::new(),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join("manifest.json");
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
