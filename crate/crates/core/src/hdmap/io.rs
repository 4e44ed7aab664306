//! On-disk map formats.
//!
//! Lane graph: JSON, a list of lanes, each a list of `[x, y, z]` triples.
//!
//! Raster (`.rstr`), little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `RSTR` |
//! | 4     | u32 rows |
//! | 4     | u32 cols |
//! | 8     | f64 origin_x |
//! | 8     | f64 origin_y |
//! | 8     | f64 resolution |
//! | 4·rows·cols | f32 values, row-major, row 0 at origin_y |

use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point2, Point3};
use crate::io_util::{read_file, write_atomic, Reader};

use super::{LaneGraph, Raster};

pub const RASTER_MAGIC: &[u8; 4] = b"RSTR";

pub fn encode_raster(r: &Raster) -> Vec<u8> {
    let mut out = Vec::with_capacity(36 + 4 * r.values.len());
    out.extend_from_slice(RASTER_MAGIC);
    out.extend_from_slice(&(r.rows as u32).to_le_bytes());
    out.extend_from_slice(&(r.cols as u32).to_le_bytes());
    out.extend_from_slice(&r.origin.x.to_le_bytes());
    out.extend_from_slice(&r.origin.y.to_le_bytes());
    out.extend_from_slice(&r.resolution.to_le_bytes());
    for v in &r.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_raster(bytes: &[u8], path: &Path) -> Result<Raster> {
    let mut rd = Reader::new(bytes, path);
    rd.magic(RASTER_MAGIC)?;
    let rows = rd.u32()? as usize;
    let cols = rd.u32()? as usize;
    let ox = rd.f64()?;
    let oy = rd.f64()?;
    let res = rd.f64()?;
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::format(path, "raster size overflows"))?;
    if rd.remaining() != n * 4 {
        return Err(Error::format(
            path,
            format!(
                "expected {} value bytes for {rows}x{cols}, found {}",
                n * 4,
                rd.remaining()
            ),
        ));
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(rd.f32()?);
    }
    Raster::new(Point2::new(ox, oy), res, rows, cols, values).map_err(|e| Error::format(path, e.to_string()))
}

pub fn read_raster(path: &Path) -> Result<Raster> {
    decode_raster(&read_file(path)?, path)
}

pub fn write_raster(path: &Path, r: &Raster) -> Result<()> {
    write_atomic(path, &encode_raster(r))
}

pub fn encode_lanes(g: &LaneGraph) -> Vec<u8> {
    let lanes: Vec<Vec<[f64; 3]>> = g
        .lanes
        .iter()
        .map(|l| l.iter().map(|p| [p.x, p.y, p.z]).collect())
        .collect();
    serde_json::to_vec(&lanes).expect("lane graph serializes")
}

pub fn decode_lanes(bytes: &[u8], path: &Path) -> Result<LaneGraph> {
    let lanes: Vec<Vec<[f64; 3]>> = serde_json::from_slice(bytes).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let lanes = lanes
        .into_iter()
        .map(|l| l.into_iter().map(|[x, y, z]| Point3::new(x, y, z)).collect())
        .collect();
    LaneGraph::new(lanes).map_err(|e| Error::format(path, e.to_string()))
}

pub fn read_lanes(path: &Path) -> Result<LaneGraph> {
    decode_lanes(&read_file(path)?, path)
}

pub fn write_lanes(path: &Path, g: &LaneGraph) -> Result<()> {
    write_atomic(path, &encode_lanes(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_round_trip() {
        let r = Raster::from_fn(Point2::new(-3.5, 2.25), 0.5, 3, 4, |p| (p.x * 2.0 + p.y) as f32).unwrap();
        let bytes = encode_raster(&r);
        assert_eq!(&bytes[..4], b"RSTR");
        assert_eq!(bytes.len(), 36 + 4 * 12);
        assert_eq!(decode_raster(&bytes, Path::new("x")).unwrap(), r);
    }

    #[test]
    fn raster_rejects_bad_magic_and_truncation() {
        let r = Raster::new(Point2::default(), 1.0, 1, 2, vec![1.0, 2.0]).unwrap();
        let mut bytes = encode_raster(&r);
        bytes.pop();
        let err = decode_raster(&bytes, Path::new("ground.rstr")).unwrap_err();
        assert!(err.to_string().contains("ground.rstr"));
        let mut bytes = encode_raster(&r);
        bytes[0] = b'X';
        assert!(decode_raster(&bytes, Path::new("g")).is_err());
    }

    #[test]
    fn lanes_json_layout() {
        let g = decode_lanes(b"[[[0,0,0],[1,0,0.5]],[[3,3,0],[3,4,0],[3,5,0]]]", Path::new("l")).unwrap();
        assert_eq!(g.lanes.len(), 2);
        assert_eq!(g.lanes[0][1], Point3::new(1.0, 0.0, 0.5));
        let again = decode_lanes(&encode_lanes(&g), Path::new("l")).unwrap();
        assert_eq!(again, g);
        assert!(decode_lanes(b"[[[0,0,0]]]", Path::new("l")).is_err());
    }
}
