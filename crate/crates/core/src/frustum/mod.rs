//! Frustum proposals: LiDAR points that fall inside a 2D instance mask once
//! projected into that mask's camera.
//!
//! The sweep is first cleaned with the map: points on the ground and points
//! far from the road are removed. Both filters keep the original point order.

pub mod io;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{CameraModel, PointCloud, Pose};
use crate::hdmap::{DriveableArea, Raster};

/// Calibrated cameras keyed by camera id.
pub type CameraRig = BTreeMap<u8, CameraModel>;

/// One 2D instance from the segmentation model.
///
/// `class_id` is the segmentation model's category id; the class table maps
/// it to a target class. `bitmap` is row-major, `width × height`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMask {
    pub camera_id: u8,
    pub class_id: u8,
    pub confidence: f32,
    pub width: u32,
    pub height: u32,
    pub bitmap: Vec<bool>,
}

impl InstanceMask {
    pub fn new(
        camera_id: u8,
        class_id: u8,
        confidence: f32,
        width: u32,
        height: u32,
        bitmap: Vec<bool>,
    ) -> Result<Self> {
        let m = InstanceMask {
            camera_id,
            class_id,
            confidence,
            width,
            height,
            bitmap,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bitmap.len() != self.width as usize * self.height as usize {
            return Err(Error::invalid(
                "mask",
                format!("{}x{} mask with {} cells", self.width, self.height, self.bitmap.len()),
            ));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::invalid(
                "mask",
                format!("confidence {} outside [0, 1]", self.confidence),
            ));
        }
        Ok(())
    }

    pub fn get(&self, col: u32, row: u32) -> bool {
        self.bitmap[row as usize * self.width as usize + col as usize]
    }

    pub fn count(&self) -> usize {
        self.bitmap.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrustumProposal {
    /// Indices into the filtered cloud handed to [`extract_frustums`],
    /// strictly increasing.
    pub point_indices: Vec<usize>,
    pub class_id: u8,
    pub confidence: f32,
    pub camera_id: u8,
    /// Position of the source mask in the frame's mask list.
    pub mask_index: usize,
    /// Fewer points than the configured minimum.
    pub low_quality: bool,
}

pub const DEFAULT_GROUND_EPS: f64 = 0.3;
pub const DEFAULT_ROI_MARGIN: f64 = 5.0;
pub const DEFAULT_MIN_POINTS: usize = 5;

/// Drop points within `eps` of the ground. Points outside the height raster
/// are kept.
pub fn remove_ground(cloud: &PointCloud, height: &Raster, eps: f64) -> PointCloud {
    cloud
        .iter()
        .copied()
        .filter(|p| match height.ground_height_at(p.bev()) {
            Ok(g) => p.z > g + eps,
            Err(_) => true,
        })
        .collect()
}

/// Keep points within `margin` meters of the driveable area.
pub fn filter_roi(cloud: &PointCloud, drive: &DriveableArea, margin: f64) -> PointCloud {
    cloud
        .iter()
        .copied()
        .filter(|p| drive.in_roi(p.bev(), margin))
        .collect()
}

/// Backproject each mask onto the map-frame `cloud`.
///
/// `ego` maps ego coordinates into the map frame; camera extrinsics map ego
/// coordinates into each camera. Masks that collect no point are dropped.
pub fn extract_frustums(
    cloud: &PointCloud,
    masks: &[InstanceMask],
    cameras: &CameraRig,
    ego: &Pose,
    min_points: usize,
) -> Result<Vec<FrustumProposal>> {
    for m in masks {
        let cam = cameras
            .get(&m.camera_id)
            .ok_or_else(|| Error::BadCalibration(format!("mask refers to unknown camera {}", m.camera_id)))?;
        if cam.width != m.width || cam.height != m.height {
            return Err(Error::BadCalibration(format!(
                "mask is {}x{} but camera {} is {}x{}",
                m.width, m.height, m.camera_id, cam.width, cam.height
            )));
        }
        m.validate()?;
    }

    let ego_from_map = ego.inverse();
    let ego_points: Vec<_> = cloud.iter().map(|&p| ego_from_map.apply(p)).collect();

    // One projection pass per camera that has masks.
    let used: BTreeSet<u8> = masks.iter().map(|m| m.camera_id).collect();
    let mut pixels: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
    for id in used {
        let cam = &cameras[&id];
        cam.validate()?;
        let w = cam.width;
        let px = ego_points
            .iter()
            .map(|&p| match cam.project_camera_point(cam.extrinsic.apply(p)) {
                Some(proj) => {
                    let (u, v) = proj.pixel();
                    v * w + u
                }
                None => u32::MAX,
            })
            .collect();
        pixels.insert(id, px);
    }

    let mut out = Vec::new();
    for (mask_index, m) in masks.iter().enumerate() {
        let px = &pixels[&m.camera_id];
        let point_indices: Vec<usize> = px
            .iter()
            .enumerate()
            .filter(|&(_, &pix)| pix != u32::MAX && m.bitmap[pix as usize])
            .map(|(i, _)| i)
            .collect();
        if point_indices.is_empty() {
            continue;
        }
        out.push(FrustumProposal {
            low_quality: point_indices.len() < min_points,
            point_indices,
            class_id: m.class_id,
            confidence: m.confidence,
            camera_id: m.camera_id,
            mask_index,
        });
    }
    Ok(out)
}
