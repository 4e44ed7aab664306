use serde::{Deserialize, Serialize};

use super::{Point3, Pose};
use crate::error::{Error, Result};

/// Pinhole camera.
///
/// Camera frame: +z along the optical axis, +x to the right of the image,
/// +y down. `extrinsic` maps ego-frame points into that frame. Pixel `(i, j)`
/// is centered on `u = i, v = j`, so the image spans
/// `[-0.5, width - 0.5) × [-0.5, height - 0.5)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    pub extrinsic: Pose,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

impl Projection {
    /// Nearest pixel `(col, row)`.
    pub fn pixel(&self) -> (u32, u32) {
        (self.u.round() as u32, self.v.round() as u32)
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) || !self.cx.is_finite() || !self.cy.is_finite() {
            return Err(Error::BadCalibration(format!(
                "focal lengths must be positive (fx={}, fy={})",
                self.fx, self.fy
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::BadCalibration("image size must be positive".into()));
        }
        self.extrinsic
            .validate()
            .map_err(|e| Error::BadCalibration(e.to_string()))
    }

    /// Project a point already expressed in the camera frame.
    pub fn project_camera_point(&self, p: Point3) -> Option<Projection> {
        if !(p.z > 0.0) {
            return None;
        }
        let u = self.fx * p.x / p.z + self.cx;
        let v = self.fy * p.y / p.z + self.cy;
        let inside = u >= -0.5 && u < self.width as f64 - 0.5 && v >= -0.5 && v < self.height as f64 - 0.5;
        inside.then_some(Projection { u, v, depth: p.z })
    }
}

/// Project an ego-frame point; `None` when it is behind the camera or falls
/// outside the image.
pub fn project_point(cam: &CameraModel, ego_point: Point3) -> Option<Projection> {
    cam.project_camera_point(cam.extrinsic.apply(ego_point))
}
