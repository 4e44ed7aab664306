//! On-disk dataset layout:
//!
//! ```text
//! <root>/map/lanes.json
//! <root>/map/ground.rstr
//! <root>/map/drive.rstr
//! <root>/frames/<frame_id>/points.ldr
//! <root>/frames/<frame_id>/masks.msk
//! <root>/frames/<frame_id>/ego_pose.json
//! <root>/frames/<frame_id>/cameras.json
//! ```
//!
//! Synthetic datasets also carry `gt/<frame_id>.jsonl` and the scene spec.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::frustum::io as fio;
use crate::geom::Pose;
use crate::hdmap::HdMap;
use crate::inflate::Frame;

#[derive(Debug, Clone)]
pub struct DatasetLayout {
    pub root: PathBuf,
}

impl DatasetLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DatasetLayout { root: root.into() }
    }

    pub fn map_dir(&self) -> PathBuf {
        self.root.join("map")
    }

    pub fn frames_dir(&self) -> PathBuf {
        self.root.join("frames")
    }

    pub fn frame_dir(&self, id: &str) -> PathBuf {
        self.frames_dir().join(id)
    }

    pub fn gt_dir(&self) -> PathBuf {
        self.root.join("gt")
    }

    pub fn load_map(&self) -> Result<HdMap> {
        HdMap::load(&self.map_dir())
    }

    /// Frame ids in sorted order. A missing `frames/` directory is an error;
    /// an empty one is not.
    pub fn frame_ids(&self) -> Result<Vec<String>> {
        let dir = self.frames_dir();
        let mut ids = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            if entry.file_type().map_err(|e| Error::io(entry.path(), e))?.is_dir() {
                ids.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn load_pose(&self, id: &str) -> Result<Pose> {
        fio::read_pose(&self.frame_dir(id).join("ego_pose.json"))
    }

    pub fn load_frame(&self, id: &str) -> Result<Frame> {
        let dir = self.frame_dir(id);
        Ok(Frame {
            id: id.to_string(),
            points: fio::read_points(&dir.join("points.ldr"))?,
            masks: fio::read_masks(&dir.join("masks.msk"))?,
            cameras: fio::read_cameras(&dir.join("cameras.json"))?,
            ego: fio::read_pose(&dir.join("ego_pose.json"))?,
        })
    }

    pub fn write_frame(&self, frame: &Frame) -> Result<()> {
        let dir = self.frame_dir(&frame.id);
        fio::write_points(&dir.join("points.ldr"), &frame.points)?;
        fio::write_masks(&dir.join("masks.msk"), &frame.masks)?;
        fio::write_cameras(&dir.join("cameras.json"), &frame.cameras)?;
        fio::write_pose(&dir.join("ego_pose.json"), &frame.ego)
    }

    pub fn write_map(&self, map: &HdMap) -> Result<()> {
        map.save(&self.map_dir())
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
