//! File formats: step paths, flight tables and distance reports.
//!
//! Path files are CSV preceded by one `# {json}` line:
//!
//! ```text
//! # {"format":"levy-lab/path","version":1,"start":0.0,"end":1.0,"side":"cadlag","meta":{}}
//! breakpoint,value
//! 0,0.0
//! 0.5,1.0
//! ```
//!
//! The first row holds the domain start and the initial value; every further
//! row is a breakpoint and the value from there on. Floats are written in the
//! shortest form that reads back to the same number.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::path::{Side, StepPath};
use crate::skorokhod::{DistanceResult, Metric, WitnessSummary};
use crate::walk::Flight;

pub const PATH_FORMAT: &str = "levy-lab/path";
pub const FORMAT_VERSION: u32 = 1;

/// Header line of a path file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathHeader {
    pub format: String,
    pub version: u32,
    pub start: f64,
    pub end: f64,
    pub side: Side,
    /// Free-form provenance (run configuration, tool version).
    #[serde(default)]
    pub meta: Value,
}

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

pub fn write_path<W: Write>(out: W, path: &StepPath, meta: Value) -> Result<()> {
    let mut out = out;
    let header = PathHeader {
        format: PATH_FORMAT.into(),
        version: FORMAT_VERSION,
        start: path.start(),
        end: path.end(),
        side: path.side(),
        meta,
    };
    writeln!(out, "# {}", serde_json::to_string(&header).map_err(format_err)?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["breakpoint", "value"]).map_err(format_err)?;
    let starts = std::iter::once(path.start()).chain(path.breaks().iter().copied());
    for (t, v) in starts.zip(path.values()) {
        w.write_record([t.to_string(), v.to_string()]).map_err(format_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_path<R: BufRead>(mut input: R) -> Result<(StepPath, PathHeader)> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let json = first
        .trim_end()
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("path file must start with a '# {json}' header line".into()))?;
    let header: PathHeader = serde_json::from_str(json.trim()).map_err(format_err)?;
    if header.format != PATH_FORMAT {
        return Err(Error::Format(format!("unknown format {:?}", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", header.version)));
    }
    let mut r = csv::Reader::from_reader(input);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.deserialize() {
        let (t, v): (f64, f64) = rec.map_err(format_err)?;
        times.push(t);
        values.push(v);
    }
    if times.first() != Some(&header.start) {
        return Err(Error::Format("first row must hold the domain start".into()));
    }
    let path = StepPath::new(header.start, header.end, times[1..].to_vec(), values, header.side)?;
    Ok((path, header))
}

/// Flight table with columns `i,S_i,Y_i`.
pub fn write_flight<W: Write>(out: W, flight: &Flight) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i", "S_i", "Y_i"]).map_err(format_err)?;
    for (i, (s, y)) in flight.walk().positions().iter().zip(flight.targets()).enumerate() {
        w.write_record([i.to_string(), s.to_string(), y.to_string()]).map_err(format_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `(i, S_i, Y_i)` of a flight table.
pub fn read_flight<R: std::io::Read>(input: R) -> Result<Vec<(usize, i128, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(format_err)?;
        if rec.len() != 3 {
            return Err(Error::Format(format!("expected 3 columns, got {}", rec.len())));
        }
        let i = rec[0].parse().map_err(format_err)?;
        let s = rec[1].parse().map_err(format_err)?;
        let y = rec[2].parse().map_err(format_err)?;
        rows.push((i, s, y));
    }
    Ok(rows)
}

/// JSON form of a distance estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub metric: Metric,
    pub value: f64,
    pub slack: f64,
    pub m: usize,
    pub witness_summary: WitnessSummary,
}

impl DistanceReport {
    pub fn new(result: &DistanceResult, f: &StepPath, g: &StepPath) -> Result<Self> {
        Ok(DistanceReport {
            metric: result.metric,
            value: result.value,
            slack: result.slack,
            m: result.m,
            witness_summary: result.summary(f, g)?,
        })
    }
}
