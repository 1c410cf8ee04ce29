//! Region files: CSV and JSON writers and readers.
//!
//! Floats are written in their shortest round-trip form, so reading a file
//! and writing it back reproduces it byte for byte.

use std::io::{Read, Write};

use noma_eh::{Binding, RatePoint, RegionBoundary, Scheme};
use serde::{Deserialize, Serialize};

use crate::config::ParamsEcho;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub r1_bps_hz: f64,
    pub r2_bps_hz: f64,
    pub r1_mbps: f64,
    pub r2_mbps: f64,
    pub t: Option<f64>,
    pub rho: Option<f64>,
    pub p2_1_w: Option<f64>,
    pub p1_2_w: Option<f64>,
    pub p2_2_w: Option<f64>,
    pub feasible: bool,
    pub binding_r2_constraint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonPoint {
    pub r1: f64,
    pub r2: f64,
    pub t: Option<f64>,
    pub rho: Option<f64>,
    pub p2_1: Option<f64>,
    pub p1_2: Option<f64>,
    pub p2_2: Option<f64>,
    pub feasible: bool,
    pub binding: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonRegion {
    pub scheme: String,
    pub params: ParamsEcho,
    pub r1_max: Option<f64>,
    pub points: Vec<JsonPoint>,
}

fn csv_row(pt: &RatePoint, mbps: f64) -> CsvRow {
    let a = pt.alloc.as_ref();
    CsvRow {
        r1_bps_hz: pt.r1,
        r2_bps_hz: pt.r2,
        r1_mbps: pt.r1 * mbps,
        r2_mbps: pt.r2 * mbps,
        t: a.map(|a| a.t),
        rho: a.map(|a| a.rho),
        p2_1_w: a.map(|a| a.p2_1),
        p1_2_w: a.map(|a| a.p1_2),
        p2_2_w: a.map(|a| a.p2_2),
        feasible: pt.feasible,
        binding_r2_constraint: pt.binding.as_str().to_string(),
    }
}

fn json_point(pt: &RatePoint) -> JsonPoint {
    let a = pt.alloc.as_ref();
    JsonPoint {
        r1: pt.r1,
        r2: pt.r2,
        t: a.map(|a| a.t),
        rho: a.map(|a| a.rho),
        p2_1: a.map(|a| a.p2_1),
        p1_2: a.map(|a| a.p1_2),
        p2_2: a.map(|a| a.p2_2),
        feasible: pt.feasible,
        binding: pt.binding.as_str().to_string(),
    }
}

const CSV_HEADER: [&str; 11] = [
    "r1_bps_hz",
    "r2_bps_hz",
    "r1_mbps",
    "r2_mbps",
    "t",
    "rho",
    "p2_1_w",
    "p1_2_w",
    "p2_2_w",
    "feasible",
    "binding_r2_constraint",
];

fn write_csv_rows<W: Write>(rows: &[CsvRow], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(region: &RegionBoundary, mbps: f64, out: W) -> Result<(), CliError> {
    let rows: Vec<CsvRow> = region.points.iter().map(|p| csv_row(p, mbps)).collect();
    write_csv_rows(&rows, out)
}

pub fn json_region(region: &RegionBoundary, params: ParamsEcho) -> JsonRegion {
    JsonRegion {
        scheme: region.scheme.as_str().to_string(),
        params,
        r1_max: region.r1_max,
        points: region.points.iter().map(json_point).collect(),
    }
}

fn write_json_doc<W: Write>(doc: &JsonRegion, mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, doc).map_err(|e| CliError::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_json<W: Write>(
    region: &RegionBoundary,
    params: ParamsEcho,
    out: W,
) -> Result<(), CliError> {
    write_json_doc(&json_region(region, params), out)
}

/// A region file as read back.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionFile {
    /// No bytes beyond whitespace.
    Empty,
    Csv(Vec<CsvRow>),
    Json(Box<JsonRegion>),
}

fn parse_binding(s: &str) -> Result<Binding, CliError> {
    s.parse()
        .map_err(|e: noma_eh::Error| CliError::Parse(e.to_string()))
}

impl RegionFile {
    /// Reads either format; JSON is recognized by a leading `{`.
    pub fn read<R: Read>(mut input: R) -> Result<Self, CliError> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        if text.trim_start().starts_with('{') {
            let doc: JsonRegion =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            for p in &doc.points {
                parse_binding(&p.binding)?;
            }
            doc.scheme
                .parse::<Scheme>()
                .map_err(|e| CliError::Parse(e.to_string()))?;
            return Ok(RegionFile::Json(Box::new(doc)));
        }
        if text.trim().is_empty() {
            return Ok(RegionFile::Empty);
        }
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| CliError::Parse(e.to_string()))?;
        if header.iter().ne(CSV_HEADER) {
            return Err(CliError::Parse(format!(
                "unexpected CSV header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let rows = r
            .deserialize()
            .collect::<Result<Vec<CsvRow>, _>>()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        for row in &rows {
            parse_binding(&row.binding_r2_constraint)?;
        }
        Ok(RegionFile::Csv(rows))
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), CliError> {
        match self {
            RegionFile::Empty => Ok(()),
            RegionFile::Csv(rows) => write_csv_rows(rows, out),
            RegionFile::Json(doc) => write_json_doc(doc, out),
        }
    }

    fn rate_points(&self) -> Vec<RatePoint> {
        let point = |r1: f64, r2: f64, feasible: bool| RatePoint {
            r1,
            r2,
            alloc: None,
            feasible,
            binding: Binding::None,
        };
        match self {
            RegionFile::Empty => Vec::new(),
            RegionFile::Csv(rows) => rows
                .iter()
                .map(|r| point(r.r1_bps_hz, r.r2_bps_hz, r.feasible))
                .collect(),
            RegionFile::Json(doc) => doc
                .points
                .iter()
                .map(|p| point(p.r1, p.r2, p.feasible))
                .collect(),
        }
    }

    /// The time-sharing hull, in the same format. Samples on the envelope
    /// keep their records untouched; lifted samples and added anchors carry
    /// only rates.
    pub fn hull(&self) -> RegionFile {
        let (scheme, r1_max) = match self {
            RegionFile::Empty => return RegionFile::Empty,
            RegionFile::Csv(_) => (Scheme::Gen, None),
            RegionFile::Json(doc) => (doc.scheme.parse().unwrap_or(Scheme::Gen), doc.r1_max),
        };
        let boundary = RegionBoundary {
            scheme,
            points: self.rate_points(),
            r1_max,
        };
        let hull = noma_eh::oracle::time_sharing_hull(&boundary);
        let originals = boundary.points;
        let keep = |pt: &RatePoint| {
            originals
                .iter()
                .position(|o| o.r1 == pt.r1 && o.r2 == pt.r2 && o.feasible == pt.feasible)
        };
        match self {
            RegionFile::Empty => RegionFile::Empty,
            RegionFile::Csv(rows) => {
                let mbps = mbps_factor(rows);
                let out = hull
                    .points
                    .iter()
                    .map(|pt| match keep(pt) {
                        Some(i) => rows[i].clone(),
                        None => {
                            let mut row = csv_row(pt, mbps);
                            if let Some(i) = originals.iter().position(|o| o.r1 == pt.r1) {
                                row.r1_mbps = rows[i].r1_mbps;
                            }
                            row
                        }
                    })
                    .collect();
                RegionFile::Csv(out)
            }
            RegionFile::Json(doc) => {
                let points = hull
                    .points
                    .iter()
                    .map(|pt| match keep(pt) {
                        Some(i) => doc.points[i].clone(),
                        None => json_point(pt),
                    })
                    .collect();
                RegionFile::Json(Box::new(JsonRegion {
                    points,
                    ..(**doc).clone()
                }))
            }
        }
    }
}

/// Mbit/s per bit/s/Hz as recorded in the rows; 10 (a 10 MHz band) when no
/// row carries a nonzero rate.
fn mbps_factor(rows: &[CsvRow]) -> f64 {
    rows.iter()
        .find_map(|r| {
            if r.r2_bps_hz > 0.0 {
                Some(r.r2_mbps / r.r2_bps_hz)
            } else if r.r1_bps_hz > 0.0 {
                Some(r.r1_mbps / r.r1_bps_hz)
            } else {
                None
            }
        })
        .unwrap_or(10.0)
}
