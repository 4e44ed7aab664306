//! Label files: one JSON object per line, one file per frame.
//!
//! ```text
//! {"frame_id":"000012","class":"vehicle","x":..,"y":..,"z":..,"w":..,"l":..,"h":..,"theta":..,"confidence":0.9,"dont_care":false}
//! ```
//!
//! Mined labels, ground truth and predictions all use this record. Files are
//! named `<frame_id>.jsonl`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Cuboid;
use crate::inflate::MinedCuboid;
use crate::io_util::{read_file, write_atomic};

pub const LABEL_EXT: &str = "jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub frame_id: String,
    pub class: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub l: f64,
    pub h: f64,
    pub theta: f64,
    #[serde(default = "one")]
    pub confidence: f64,
    #[serde(default)]
    pub dont_care: bool,
}

fn one() -> f64 {
    1.0
}

impl LabelRecord {
    pub fn new(frame_id: &str, m: &MinedCuboid) -> Self {
        let c = &m.cuboid;
        LabelRecord {
            frame_id: frame_id.to_string(),
            class: m.class.clone(),
            x: c.x,
            y: c.y,
            z: c.z,
            w: c.w,
            l: c.l,
            h: c.h,
            theta: c.theta,
            confidence: m.confidence,
            dont_care: m.dont_care,
        }
    }

    pub fn to_mined(&self) -> Result<MinedCuboid> {
        let cuboid = Cuboid {
            x: self.x,
            y: self.y,
            z: self.z,
            w: self.w,
            l: self.l,
            h: self.h,
            theta: self.theta,
        };
        cuboid.validate()?;
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::invalid(
                "label",
                format!("confidence {} outside [0, 1]", self.confidence),
            ));
        }
        Ok(MinedCuboid {
            cuboid,
            class: self.class.clone(),
            confidence: self.confidence,
            dont_care: self.dont_care,
        })
    }
}

pub fn encode_labels(frame_id: &str, cuboids: &[MinedCuboid]) -> Vec<u8> {
    let mut out = Vec::new();
    for m in cuboids {
        serde_json::to_writer(&mut out, &LabelRecord::new(frame_id, m)).expect("label serializes");
        out.push(b'\n');
    }
    out
}

pub fn decode_labels(bytes: &[u8], path: &Path) -> Result<Vec<LabelRecord>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::format(path, e.to_string()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| serde_json::from_str(line).map_err(|e| Error::format(path, format!("line {}: {e}", i + 1))))
        .collect()
}

pub fn write_labels(path: &Path, frame_id: &str, cuboids: &[MinedCuboid]) -> Result<()> {
    write_atomic(path, &encode_labels(frame_id, cuboids))
}

pub fn read_labels(path: &Path) -> Result<Vec<LabelRecord>> {
    decode_labels(&read_file(path)?, path)
}

/// Read every `*.jsonl` in `dir`, keyed by file stem. Records must carry the
/// frame id of their file.
pub fn read_label_dir(dir: &Path) -> Result<BTreeMap<String, Vec<MinedCuboid>>> {
    let mut out = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some(LABEL_EXT) {
            continue;
        }
        let Some(frame_id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
            continue;
        };
        let mut cuboids = Vec::new();
        for (i, r) in read_labels(&path)?.into_iter().enumerate() {
            if r.frame_id != frame_id {
                return Err(Error::format(
                    &path,
                    format!("record {} has frame_id {:?}, expected {frame_id:?}", i + 1, r.frame_id),
                ));
            }
            cuboids.push(
                r.to_mined()
                    .map_err(|e| Error::format(&path, format!("record {}: {e}", i + 1)))?,
            );
        }
        out.insert(frame_id, cuboids);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;

    fn mined() -> MinedCuboid {
        MinedCuboid {
            cuboid: Cuboid::new(Point3::new(1.0, 2.0, 0.8), 1.9, 4.7, 1.6, 0.25).unwrap(),
            class: "vehicle".into(),
            confidence: 0.5,
            dont_care: true,
        }
    }

    #[test]
    fn record_fields() {
        let bytes = encode_labels("000003", &[mined()]);
        let v: serde_json::Value = serde_json::from_slice(bytes.strip_suffix(b"\n").unwrap()).unwrap();
        for k in [
            "frame_id",
            "class",
            "x",
            "y",
            "z",
            "w",
            "l",
            "h",
            "theta",
            "confidence",
            "dont_care",
        ] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["dont_care"], true);
    }

    #[test]
    fn dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write_labels(&dir.path().join("a.jsonl"), "a", &[mined(), mined()]).unwrap();
        write_labels(&dir.path().join("b.jsonl"), "b", &[]).unwrap();
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let all = read_label_dir(dir.path()).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all["a"], vec![mined(), mined()]);
        assert!(all["b"].is_empty());
    }

    #[test]
    fn wrong_frame_id_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_labels(&dir.path().join("a.jsonl"), "b", &[mined()]).unwrap();
        let err = read_label_dir(dir.path()).unwrap_err();
        assert!(err.to_string().contains("a.jsonl"), "{err}");
    }

    #[test]
    fn defaults_for_ground_truth() {
        let line = br#"{"frame_id":"f","class":"bus","x":0,"y":0,"z":1,"w":2,"l":10,"h":2,"theta":0}"#;
        let r = decode_labels(line, Path::new("gt")).unwrap();
        assert_eq!(r[0].confidence, 1.0);
        assert!(!r[0].dont_care);
    }
}
