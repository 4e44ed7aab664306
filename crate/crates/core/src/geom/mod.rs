//! Geometric kernels shared by the mining pipeline, the evaluator and the
//! synthetic-scene generator.
//!
//! Frames are right-handed with z up. Yaw angles are measured
//! counter-clockwise from +x and kept in `(-π, π]`.

mod camera;
mod cuboid;
mod iou;
mod median;
mod rect;

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use camera::{project_point, CameraModel, Projection};
pub use cuboid::{cuboid_corners, Cuboid};
pub use iou::{bev_iou, clip_convex, polygon_area};
pub use median::{geometric_median, sum_of_distances};
pub use rect::{convex_hull, min_area_rect, min_area_rect_with_eps, BevRect, DEGENERATE_EXTENT};

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a - TAU * ((a + PI) / TAU).floor();
    if w <= -PI {
        w += TAU;
    }
    if w > PI {
        w -= TAU;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Rotate counter-clockwise about the origin.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// A LiDAR return or any other 3D location, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn bev(self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// An ordered point set. Order is preserved by every filter in the crate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point3>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3> {
        self.points.iter()
    }

    pub fn bev(&self) -> Vec<Point2> {
        self.points.iter().map(|p| p.bev()).collect()
    }

    pub fn transformed(&self, pose: &Pose) -> PointCloud {
        PointCloud::new(self.points.iter().map(|&p| pose.apply(p)).collect())
    }

    /// Gather the points at `indices`, in index order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud::new(indices.iter().map(|&i| self.points[i]).collect())
    }
}

impl FromIterator<Point3> for PointCloud {
    fn from_iter<I: IntoIterator<Item = Point3>>(iter: I) -> Self {
        PointCloud::new(iter.into_iter().collect())
    }
}

/// Rigid transform `p ↦ R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: [[f64; 3]; 3],
    pub translation: Point3,
}

const POSE_TOL: f64 = 1e-9;

impl Pose {
    pub const IDENTITY: Pose = Pose {
        rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        translation: Point3::new(0.0, 0.0, 0.0),
    };

    /// Build a pose, rejecting rotations that are not proper orthonormal
    /// matrices within 1e-9.
    pub fn new(rotation: [[f64; 3]; 3], translation: Point3) -> Result<Self> {
        let pose = Pose { rotation, translation };
        pose.validate()?;
        Ok(pose)
    }

    /// Rotation about +z by `yaw`, then translation.
    pub fn from_yaw(yaw: f64, translation: Point3) -> Self {
        let (s, c) = yaw.sin_cos();
        Pose {
            rotation: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            translation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        if !r.iter().flatten().all(|v| v.is_finite()) || !self.translation.is_finite() {
            return Err(Error::invalid("pose", "non-finite entry"));
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > POSE_TOL {
                    return Err(Error::invalid("pose", "rotation is not orthonormal"));
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > POSE_TOL {
            return Err(Error::invalid("pose", "rotation determinant is not +1"));
        }
        Ok(())
    }

    pub fn rotate(&self, p: Point3) -> Point3 {
        let r = &self.rotation;
        Point3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        )
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.rotate(p) + self.translation
    }

    pub fn inverse(&self) -> Pose {
        let r = &self.rotation;
        let rt = [
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ];
        let inv = Pose {
            rotation: rt,
            translation: Point3::default(),
        };
        let t = inv.rotate(self.translation);
        Pose {
            rotation: rt,
            translation: Point3::new(-t.x, -t.y, -t.z),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        let a = &self.rotation;
        let b = &other.rotation;
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Pose {
            rotation: r,
            translation: self.apply(other.translation),
        }
    }

    /// Heading of the pose's +x axis projected onto the ground plane.
    pub fn yaw(&self) -> f64 {
        self.rotation[1][0].atan2(self.rotation[0][0])
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::IDENTITY
    }
}
