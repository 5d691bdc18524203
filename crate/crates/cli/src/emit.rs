//! Record emission. CSV floats carry 10 significant digits; JSON floats use
//! the shortest representation that round-trips.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;

pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn float(x: f64) -> String {
    format!("{x:.9e}")
}

#[derive(Debug, Serialize)]
pub struct VolumeRecord {
    pub d: u32,
    pub r: f64,
    pub v: f64,
    pub t: f64,
    pub volume: f64,
    #[serde(rename = "L")]
    pub swept: f64,
    pub trunc_bound: f64,
    pub quad_bound: f64,
    pub route: &'static str,
}

impl Record for VolumeRecord {
    const HEADER: &'static [&'static str] = &["d", "r", "v", "t", "volume", "L", "trunc_bound", "quad_bound", "route"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            float(self.r),
            float(self.v),
            float(self.t),
            float(self.volume),
            float(self.swept),
            float(self.trunc_bound),
            float(self.quad_bound),
            self.route.to_string(),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct AsymptoteRecord {
    pub d: u32,
    pub r: f64,
    pub v: f64,
    pub aleph: f64,
    pub terms_used: usize,
    pub trunc_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl Record for AsymptoteRecord {
    const HEADER: &'static [&'static str] = &["d", "r", "v", "aleph", "terms_used", "trunc_bound", "limit", "gap"];
    fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(float).unwrap_or_default();
        vec![
            self.d.to_string(),
            float(self.r),
            float(self.v),
            float(self.aleph),
            self.terms_used.to_string(),
            float(self.trunc_bound),
            opt(self.limit),
            opt(self.gap),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateRecord {
    pub d: usize,
    pub r: f64,
    pub drift: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub paths: usize,
    pub points: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub formula: f64,
    pub z: f64,
    pub bias_note: bool,
}

impl Record for SimulateRecord {
    const HEADER: &'static [&'static str] = &[
        "d", "r", "drift", "t", "dt", "paths", "points", "seed", "mean", "stderr", "ci_low", "ci_high", "formula", "z",
        "bias_note",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            float(self.r),
            self.drift.iter().map(|&x| float(x)).collect::<Vec<_>>().join(" "),
            float(self.t),
            float(self.dt),
            self.paths.to_string(),
            self.points.to_string(),
            self.seed.to_string(),
            float(self.mean),
            float(self.stderr),
            float(self.ci_low),
            float(self.ci_high),
            float(self.formula),
            float(self.z),
            self.bias_note.to_string(),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct DriftlessRecord {
    pub m: u32,
    pub r: f64,
    pub t: f64,
    #[serde(rename = "L0")]
    pub swept: f64,
    pub volume: f64,
}

impl Record for DriftlessRecord {
    const HEADER: &'static [&'static str] = &["m", "r", "t", "L0", "volume"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            float(self.r),
            float(self.t),
            float(self.swept),
            float(self.volume),
        ]
    }
}

pub fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes `records` as CSV rows under a header, or as a JSON object (one
/// record) or array.
pub fn write<R: Record>(records: &[R], format: Format, out: Option<&Path>, as_array: bool) -> io::Result<()> {
    let mut w = open(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(R::HEADER)?;
            for r in records {
                csv.write_record(r.fields())?;
            }
            csv.flush()?;
        }
        Format::Json => {
            if as_array {
                serde_json::to_writer_pretty(&mut w, records)?;
            } else {
                serde_json::to_writer_pretty(&mut w, &records[0])?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}
