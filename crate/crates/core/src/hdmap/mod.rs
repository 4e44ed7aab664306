//! HD-map data model: directed lane centerlines, a ground-height raster and a
//! driveable-area raster, all in the map frame.

pub mod io;
mod lanes;
mod raster;

use std::path::Path;

use crate::error::Result;
use crate::geom::Point2;

pub use lanes::{nearest_lane_tangent, LaneGraph, LaneIndex, LaneTangent, DEFAULT_LANE_CELL};
pub use raster::{DriveableArea, Raster};

/// A loaded map. Immutable after construction; every query takes `&self`.
#[derive(Debug, Clone)]
pub struct HdMap {
    pub lanes: LaneGraph,
    pub lane_index: LaneIndex,
    pub ground: Raster,
    pub drive: DriveableArea,
}

impl HdMap {
    pub fn new(lanes: LaneGraph, ground: Raster, drive: Raster) -> Self {
        let lane_index = LaneIndex::new(&lanes);
        HdMap {
            lanes,
            lane_index,
            ground,
            drive: DriveableArea::new(drive),
        }
    }

    /// Load `lanes.json`, `ground.rstr` and `drive.rstr` from `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let lanes = io::read_lanes(&dir.join("lanes.json"))?;
        let ground = io::read_raster(&dir.join("ground.rstr"))?;
        let drive = io::read_raster(&dir.join("drive.rstr"))?;
        Ok(HdMap::new(lanes, ground, drive))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        io::write_lanes(&dir.join("lanes.json"), &self.lanes)?;
        io::write_raster(&dir.join("ground.rstr"), &self.ground)?;
        io::write_raster(&dir.join("drive.rstr"), self.drive.raster())
    }

    pub fn ground_height_at(&self, p: Point2) -> Result<f64> {
        self.ground.ground_height_at(p)
    }

    pub fn in_roi(&self, p: Point2, margin: f64) -> bool {
        self.drive.in_roi(p, margin)
    }

    pub fn nearest_lane_tangent(&self, p: Point2) -> Result<LaneTangent> {
        self.lane_index.nearest_lane_tangent(p)
    }
}
