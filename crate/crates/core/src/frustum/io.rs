//! Per-frame sensor files.
//!
//! Point cloud (`points.ldr`), little-endian: magic `LDR1`, u32 count, then
//! `count × (f32 x, f32 y, f32 z)` in the ego frame.
//!
//! Masks (`masks.msk`), little-endian: magic `MASK`, u32 count, then per
//! instance: u8 camera_id, u8 class_id, f32 confidence, u32 width, u32
//! height, followed by `ceil(width·height / 8)` bytes of the row-major bitmap
//! packed most-significant bit first. Padding bits in the last byte are zero.
//!
//! Ego pose (`ego_pose.json`) and cameras (`cameras.json`) are JSON; the pose
//! maps ego coordinates into the map frame.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CameraRig, InstanceMask};
use crate::error::{Error, Result};
use crate::geom::{CameraModel, Point3, PointCloud, Pose};
use crate::io_util::{read_file, write_atomic, Reader};

pub const POINTS_MAGIC: &[u8; 4] = b"LDR1";
pub const MASK_MAGIC: &[u8; 4] = b"MASK";

pub fn encode_points(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 12 * cloud.len());
    out.extend_from_slice(POINTS_MAGIC);
    out.extend_from_slice(&(cloud.len() as u32).to_le_bytes());
    for p in cloud.iter() {
        for v in [p.x, p.y, p.z] {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode_points(bytes: &[u8], path: &Path) -> Result<PointCloud> {
    let mut rd = Reader::new(bytes, path);
    rd.magic(POINTS_MAGIC)?;
    let n = rd.u32()? as usize;
    if rd.remaining() != n * 12 {
        return Err(Error::format(
            path,
            format!("header says {n} points but {} payload bytes follow", rd.remaining()),
        ));
    }
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let p = Point3::new(rd.f32()? as f64, rd.f32()? as f64, rd.f32()? as f64);
        if !p.is_finite() {
            return Err(Error::format(path, format!("point {i} is not finite")));
        }
        pts.push(p);
    }
    Ok(PointCloud::new(pts))
}

pub fn read_points(path: &Path) -> Result<PointCloud> {
    decode_points(&read_file(path)?, path)
}

pub fn write_points(path: &Path, cloud: &PointCloud) -> Result<()> {
    write_atomic(path, &encode_points(cloud))
}

pub fn encode_masks(masks: &[InstanceMask]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MASK_MAGIC);
    out.extend_from_slice(&(masks.len() as u32).to_le_bytes());
    for m in masks {
        out.push(m.camera_id);
        out.push(m.class_id);
        out.extend_from_slice(&m.confidence.to_le_bytes());
        out.extend_from_slice(&m.width.to_le_bytes());
        out.extend_from_slice(&m.height.to_le_bytes());
        let mut packed = vec![0u8; m.bitmap.len().div_ceil(8)];
        for (i, _) in m.bitmap.iter().enumerate().filter(|(_, &b)| b) {
            packed[i / 8] |= 0x80 >> (i % 8);
        }
        out.extend_from_slice(&packed);
    }
    out
}

pub fn decode_masks(bytes: &[u8], path: &Path) -> Result<Vec<InstanceMask>> {
    let mut rd = Reader::new(bytes, path);
    rd.magic(MASK_MAGIC)?;
    let n = rd.u32()? as usize;
    let mut masks = Vec::with_capacity(n.min(4096));
    for k in 0..n {
        let camera_id = rd.u8()?;
        let class_id = rd.u8()?;
        let confidence = rd.f32()?;
        let width = rd.u32()?;
        let height = rd.u32()?;
        let cells = (width as usize)
            .checked_mul(height as usize)
            .ok_or_else(|| Error::format(path, format!("mask {k}: size overflows")))?;
        let packed = rd.take(cells.div_ceil(8))?;
        let bitmap = (0..cells).map(|i| packed[i / 8] & (0x80 >> (i % 8)) != 0).collect();
        let m = InstanceMask::new(camera_id, class_id, confidence, width, height, bitmap)
            .map_err(|e| Error::format(path, format!("mask {k}: {e}")))?;
        masks.push(m);
    }
    if rd.remaining() != 0 {
        return Err(Error::format(path, format!("{} trailing bytes", rd.remaining())));
    }
    Ok(masks)
}

pub fn read_masks(path: &Path) -> Result<Vec<InstanceMask>> {
    decode_masks(&read_file(path)?, path)
}

pub fn write_masks(path: &Path, masks: &[InstanceMask]) -> Result<()> {
    write_atomic(path, &encode_masks(masks))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CameraEntry {
    id: u8,
    #[serde(flatten)]
    model: CameraModel,
}

pub fn encode_cameras(rig: &CameraRig) -> Vec<u8> {
    let entries: Vec<CameraEntry> = rig
        .iter()
        .map(|(&id, m)| CameraEntry { id, model: m.clone() })
        .collect();
    serde_json::to_vec_pretty(&entries).expect("cameras serialize")
}

pub fn read_cameras(path: &Path) -> Result<CameraRig> {
    let entries: Vec<CameraEntry> = read_json(path)?;
    let mut rig = CameraRig::new();
    for e in entries {
        e.model
            .validate()
            .map_err(|err| Error::format(path, format!("camera {}: {err}", e.id)))?;
        if rig.insert(e.id, e.model).is_some() {
            return Err(Error::format(path, format!("duplicate camera id {}", e.id)));
        }
    }
    Ok(rig)
}

pub fn write_cameras(path: &Path, rig: &CameraRig) -> Result<()> {
    write_atomic(path, &encode_cameras(rig))
}

pub fn read_pose(path: &Path) -> Result<Pose> {
    let pose: Pose = read_json(path)?;
    pose.validate().map_err(|e| Error::format(path, e.to_string()))?;
    Ok(pose)
}

pub fn write_pose(path: &Path, pose: &Pose) -> Result<()> {
    write_atomic(path, &serde_json::to_vec_pretty(pose).expect("pose serializes"))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
