//! Scene input and volume exports.
//!
//! Exports are byte-deterministic for a given volume. Coordinates are
//! written in the internal right-handed frame unless [`Frame::LeftHanded`]
//! is requested, which negates X for engines with a left-handed frame.

pub mod csv;
pub mod obj;
pub mod ply;
pub mod scene;

use std::path::Path;

use thiserror::Error;

use crate::simulator::GravVolume;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    RightHanded,
    LeftHanded,
}

impl Frame {
    pub(crate) fn apply(self, p: &Vec3) -> Vec3 {
        match self {
            Frame::RightHanded => *p,
            Frame::LeftHanded => Vec3::new(-p.x, p.y, p.z),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("volume JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Io(String),
    #[error("unsupported volume file `{0}` (expected .csv or .json)")]
    UnsupportedExtension(String),
}

/// Export format selector used by the CLI and the batch pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Ply,
    Obj,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Ply => "ply",
            Format::Obj => "obj",
            Format::Json => "json",
        }
    }

    pub fn encode(self, volume: &GravVolume, frame: Frame) -> Vec<u8> {
        match self {
            Format::Csv => csv::export_in(volume, frame),
            Format::Ply => ply::export_in(volume, frame),
            Format::Obj => obj::export_in(volume, frame),
            Format::Json => export_json(volume),
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "ply" => Ok(Format::Ply),
            "obj" => Ok(Format::Obj),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (csv, ply, obj, json)")),
        }
    }
}

/// Fixed six decimals; negative zero prints as zero.
pub(crate) fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Volume with metadata as pretty JSON, for the viewer and for `info`.
pub fn export_json(volume: &GravVolume) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(volume).expect("volume serializes");
    out.push(b'\n');
    out
}

pub fn import_json(bytes: &[u8]) -> Result<GravVolume, FormatError> {
    serde_json::from_slice(bytes).map_err(|e| FormatError::Json(e.to_string()))
}

/// Reads a CSV or JSON volume, chosen by extension.
pub fn read_volume(path: &Path) -> Result<GravVolume, FormatError> {
    let bytes = std::fs::read(path).map_err(|e| FormatError::Io(format!("{}: {e}", path.display())))?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => csv::import(&bytes),
        Some("json") => import_json(&bytes),
        _ => Err(FormatError::UnsupportedExtension(path.display().to_string())),
    }
}
