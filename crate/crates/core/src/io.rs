//! File formats: curve and path-table CSV, lattice edge lists, JSON results.
//!
//! Floats are written with Rust's shortest round-trip representation, so every
//! file parses back to bit-identical values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::CollapsePoint;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind, NodeId};
use crate::paths::PathTable;
use crate::percolation::{CurvePoint, PercolationCurve, Protocol};

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    lattice: LatticeKind,
    #[serde(rename = "N")]
    node_count: usize,
    theta_norm: f64,
    c: f64,
    #[serde(rename = "P_mean")]
    p_mean: f64,
    #[serde(rename = "P_stderr")]
    p_stderr: f64,
    ensembles: usize,
    seed: u64,
    protocol: Protocol,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path, e)
    }
}

pub fn write_curve<W: Write>(writer: W, curve: &PercolationCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let path = Path::new("<curve>");
    for p in &curve.points {
        w.serialize(CurveRow {
            lattice: curve.kind,
            node_count: curve.node_count,
            theta_norm: p.theta,
            c: p.c,
            p_mean: p.p_mean,
            p_stderr: p.p_stderr,
            ensembles: curve.ensembles,
            seed: curve.seed,
            protocol: curve.protocol,
        })
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_curve<R: Read>(reader: R, origin: &Path) -> Result<PercolationCurve> {
    let mut rows = csv::Reader::from_reader(reader);
    let mut curve: Option<PercolationCurve> = None;
    for row in rows.deserialize::<CurveRow>() {
        let row = row.map_err(|e| csv_error(origin, e))?;
        let point = CurvePoint {
            theta: row.theta_norm,
            c: row.c,
            p_mean: row.p_mean,
            p_stderr: row.p_stderr,
        };
        match curve.as_mut() {
            None => {
                curve = Some(PercolationCurve {
                    kind: row.lattice,
                    node_count: row.node_count,
                    protocol: row.protocol,
                    ensembles: row.ensembles,
                    seed: row.seed,
                    points: vec![point],
                })
            }
            Some(c) => {
                if c.kind != row.lattice
                    || c.node_count != row.node_count
                    || c.protocol != row.protocol
                    || c.ensembles != row.ensembles
                    || c.seed != row.seed
                {
                    return Err(Error::parse(origin, "rows describe more than one curve"));
                }
                c.points.push(point);
            }
        }
    }
    let curve = curve.ok_or_else(|| Error::parse(origin, "no data rows"))?;
    if curve.points.windows(2).any(|w| w[0].theta >= w[1].theta) {
        return Err(Error::parse(
            origin,
            "theta_norm is not strictly increasing",
        ));
    }
    Ok(curve)
}

pub fn save_curve(path: &Path, curve: &PercolationCurve) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_curve(&mut buf, curve).map_err(|e| relabel(e, path))?;
    buf.flush().map_err(|e| Error::io(path, e))
}

pub fn load_curve(path: &Path) -> Result<PercolationCurve> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_curve(BufReader::new(file), path)
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    }
}

/// Path table as `u,v,l,n` rows with `u < v`.
pub fn write_path_table<W: Write>(writer: W, table: &PathTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let path = Path::new("<paths>");
    w.write_record(["u", "v", "l", "n"])
        .map_err(|e| csv_error(path, e))?;
    for (u, v, s) in table.iter() {
        w.write_record([
            u.to_string(),
            v.to_string(),
            s.length.to_string(),
            s.count.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeHeader {
    pub kind: LatticeKind,
    pub size: usize,
    #[serde(rename = "N")]
    pub node_count: usize,
}

/// JSON header line followed by one `u v` line per edge.
pub fn write_lattice<W: Write>(mut writer: W, lattice: &Lattice) -> Result<()> {
    let path = Path::new("<lattice>");
    let header = LatticeHeader {
        kind: lattice.kind(),
        size: lattice.size(),
        node_count: lattice.node_count(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::parse(path, e))?;
    writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    for (u, v) in lattice.edges() {
        writeln!(writer, "{u} {v}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn read_lattice<R: BufRead>(
    reader: R,
    origin: &Path,
) -> Result<(LatticeHeader, Vec<(NodeId, NodeId)>)> {
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::parse(origin, "empty file"))?
        .map_err(|e| Error::io(origin, e))?;
    let header: LatticeHeader =
        serde_json::from_str(&first).map_err(|e| Error::parse(origin, e))?;
    let mut edges = Vec::new();
    for (no, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<u32>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((NodeId(u), NodeId(v))),
            _ => return Err(Error::parse(origin, format!("bad edge on line {}", no + 2))),
        }
    }
    Ok((header, edges))
}

pub fn write_collapse_points<W: Write>(writer: W, points: &[CollapsePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let path = Path::new("<collapse>");
    for p in points {
        w.serialize(p).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_collapse_points<R: Read>(reader: R, origin: &Path) -> Result<Vec<CollapsePoint>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| csv_error(origin, e)))
        .collect()
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

/// Writes to `path`, creating parent directories.
pub fn save_with<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write(&mut buf).map_err(|e| relabel(e, path))?;
    buf.flush().map_err(|e| Error::io(path, e))
}
