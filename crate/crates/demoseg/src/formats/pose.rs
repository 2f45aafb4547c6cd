//! Pose files: CSV with header `t,x,y,z[,confidence]`, or JSON lines with
//! the same keys. An empty or null coordinate marks a dropped frame.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use demoseg_core::trajectory::{PoseRecord, PoseSample, PoseTrack};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoseFormat {
    Csv,
    JsonLines,
}

impl PoseFormat {
    /// `.jsonl` and `.ndjson` are JSON lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => PoseFormat::JsonLines,
            _ => PoseFormat::Csv,
        }
    }
}

/// Rounds to 9 significant digits, the precision the writers emit.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t: f64,
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
}

impl Row {
    fn record(&self) -> PoseRecord {
        let position = match (self.x, self.y, self.z) {
            (Some(x), Some(y), Some(z)) => Some([x, y, z]),
            _ => None,
        };
        PoseRecord {
            t: self.t,
            position,
            confidence: self.confidence,
        }
    }
}

pub fn read_pose_records<R: Read>(reader: R, format: PoseFormat) -> std::result::Result<Vec<PoseRecord>, String> {
    match format {
        PoseFormat::Csv => {
            let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
            let headers = csv.headers().map_err(|e| e.to_string())?.clone();
            for key in ["t", "x", "y", "z"] {
                if !headers.iter().any(|h| h == key) {
                    return Err(format!("header lacks column `{key}`"));
                }
            }
            csv.deserialize::<Row>()
                .enumerate()
                .map(|(i, row)| row.map(|r| r.record()).map_err(|e| format!("row {}: {e}", i + 1)))
                .collect()
        }
        PoseFormat::JsonLines => {
            let mut out = Vec::new();
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| e.to_string())?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: Row = serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?;
                out.push(row.record());
            }
            Ok(out)
        }
    }
}

pub fn load_pose_track(path: &Path) -> Result<PoseTrack> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let records = read_pose_records(file, PoseFormat::from_path(path)).map_err(|m| Error::format(path, m))?;
    Ok(PoseTrack::from_records(&records)?)
}

fn num(x: f64) -> String {
    format!("{}", sig9(x))
}

pub fn write_pose_track<W: Write>(writer: W, samples: &[PoseSample], format: PoseFormat) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    let with_confidence = samples.iter().any(|s| s.confidence.is_some());
    match format {
        PoseFormat::Csv => {
            writeln!(w, "t,x,y,z{}", if with_confidence { ",confidence" } else { "" })?;
            for s in samples {
                let [x, y, z] = s.position;
                write!(w, "{},{},{},{}", num(s.t), num(x), num(y), num(z))?;
                if with_confidence {
                    write!(w, ",{}", s.confidence.map(num).unwrap_or_default())?;
                }
                writeln!(w)?;
            }
        }
        PoseFormat::JsonLines => {
            for s in samples {
                let [x, y, z] = s.position.map(sig9);
                let row = Row {
                    t: sig9(s.t),
                    x: Some(x),
                    y: Some(y),
                    z: Some(z),
                    confidence: s.confidence.map(sig9),
                };
                serde_json::to_writer(&mut w, &row)?;
                writeln!(w)?;
            }
        }
    }
    w.flush()
}

pub fn save_pose_track(path: &Path, track: &PoseTrack) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_pose_track(file, track.samples(), PoseFormat::from_path(path)).map_err(|e| Error::io(path, e))
}
